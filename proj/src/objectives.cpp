#include "altmin/objectives.hpp"

#include <Eigen/QR>

namespace altmin {

static void require_symmetric(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) throw UsageError(std::string(who) + ": matrix must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw UsageError(std::string(who) + ": matrix must be symmetric");
}

// ---------------------------------------------------------------------------
// QuadraticForm

QuadraticForm::QuadraticForm(Matrix a, double declared_rho)
    : QuadraticForm(a, BlockPartition(static_cast<int>(a.rows()),
                                      std::max(1, static_cast<int>(a.rows()) / 2)),
                    declared_rho) {}

QuadraticForm::QuadraticForm(Matrix a, BlockPartition p, double declared_rho)
    : a_(std::move(a)), rho_(declared_rho), block_(p) {
  require_symmetric(a_, "QuadraticForm");
  if (block_.dim != a_.rows()) throw UsageError("QuadraticForm: partition dimension mismatch");
  if (rho_ < 0.0) throw UsageError("QuadraticForm: declared rho must be nonnegative");
}

Vector QuadraticForm::block_gradient(const BlockPartition& p, int k, const Vector& x) const {
  if (x.size() != dim()) throw UsageError("QuadraticForm: dimension mismatch");
  return 2.0 * (a_.middleRows(p.offset(k), p.size(k)) * x);
}

std::optional<SmoothnessConstants> QuadraticForm::constants() const {
  SmoothnessConstants c;
  c.l = 2.0 * operator_norm(a_);
  const auto& p = block_;
  c.l1 = 2.0 * operator_norm(a_.topLeftCorner(p.split, p.split));
  c.l2 = 2.0 * operator_norm(a_.bottomRightCorner(p.dim - p.split, p.dim - p.split));
  c.lt1 = c.lt2 = 2.0 * operator_norm(a_.topRightCorner(p.split, p.dim - p.split));
  c.rho = rho_;
  return c;
}

// ---------------------------------------------------------------------------
// QuarticSaddle

SmoothnessConstants quartic_constants(const Matrix& a, double tau, const BlockPartition& p) {
  require_symmetric(a, "quartic_constants");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const double lambda_max = es.eigenvalues().maxCoeff();
  if (tau < lambda_max)
    throw UsageError("quartic_constants: tau must satisfy tau >= lambda_max(A), got tau = " +
                     std::to_string(tau) + " < " + std::to_string(lambda_max));
  SmoothnessConstants c;
  c.l = 5.0 * tau;
  c.rho = 6.0 * std::sqrt(tau);
  const int d1 = p.size(1), d2 = p.size(2);
  c.l1 = std::min(2.0 * operator_norm(a.topLeftCorner(d1, d1)) + 3.0 * tau, c.l);
  c.l2 = std::min(2.0 * operator_norm(a.bottomRightCorner(d2, d2)) + 3.0 * tau, c.l);
  c.lt1 = c.lt2 = std::min(2.0 * operator_norm(a.topRightCorner(d1, d2)), c.l);
  return c;
}

QuarticSaddle::QuarticSaddle(Matrix a, double tau, BlockPartition p)
    : a_(std::move(a)), tau_(tau), constants_(quartic_constants(a_, tau, p)) {
  if (p.dim != a_.rows()) throw UsageError("QuarticSaddle: partition dimension mismatch");
}

Vector QuarticSaddle::block_gradient(const BlockPartition& p, int k, const Vector& x) const {
  if (x.size() != dim()) throw UsageError("QuarticSaddle: dimension mismatch");
  const int off = p.offset(k), n = p.size(k);
  Vector g = 2.0 * (a_.middleRows(off, n) * x);
  g += x.segment(off, n).array().cube().matrix();
  return g;
}

// ---------------------------------------------------------------------------
// MatrixFactorization

MatrixFactorization::MatrixFactorization(Matrix z, int rank) : z_(std::move(z)), rank_(rank) {
  if (rank_ < 1) throw UsageError("MatrixFactorization: rank must be >= 1");
  if (z_.rows() < 1 || z_.cols() < 1) throw UsageError("MatrixFactorization: empty data");
}

Matrix MatrixFactorization::unpack_x(const Vector& v) const {
  const auto m = z_.rows();
  return Eigen::Map<const Matrix>(v.data(), m, rank_);
}

Matrix MatrixFactorization::unpack_y(const Vector& v) const {
  const auto m = z_.rows();
  return Eigen::Map<const Matrix>(v.data() + m * rank_, rank_, z_.cols());
}

double MatrixFactorization::value(const Vector& v) const {
  if (v.size() != dim()) throw UsageError("MatrixFactorization: dimension mismatch");
  return (z_ - unpack_x(v) * unpack_y(v)).squaredNorm();
}

Vector MatrixFactorization::gradient(const Vector& v) const {
  if (v.size() != dim()) throw UsageError("MatrixFactorization: dimension mismatch");
  const Matrix x = unpack_x(v);
  const Matrix y = unpack_y(v);
  const Matrix resid = z_ - x * y;
  Vector g(dim());
  Eigen::Map<Matrix>(g.data(), z_.rows(), rank_) = -2.0 * resid * y.transpose();
  Eigen::Map<Matrix>(g.data() + z_.rows() * rank_, rank_, z_.cols()) =
      -2.0 * x.transpose() * resid;
  return g;
}

Vector MatrixFactorization::block_gradient(const BlockPartition& p, int k, const Vector& v) const {
  const BlockPartition natural = natural_partition();
  if (p.dim != natural.dim || p.split != natural.split)
    throw UsageError("MatrixFactorization: partition must match the [vec(X); vec(Y)] layout");
  const Matrix x = unpack_x(v);
  const Matrix y = unpack_y(v);
  const Matrix resid = z_ - x * y;
  if (k == 1) {
    Matrix gx = -2.0 * resid * y.transpose();
    return Eigen::Map<Vector>(gx.data(), gx.size());
  }
  BlockPartition::check_block(k);
  Matrix gy = -2.0 * x.transpose() * resid;
  return Eigen::Map<Vector>(gy.data(), gy.size());
}

// ---------------------------------------------------------------------------
// Random matrices

Matrix random_orthogonal(RngStream& rng, int d) {
  if (d < 1) throw UsageError("random_orthogonal: d must be >= 1");
  Matrix g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fixing the signs of R's diagonal makes the distribution Haar.
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Matrix random_saddle_matrix(RngStream& rng, int d) {
  if (d < 2) throw UsageError("random_saddle_matrix: d must be >= 2");
  Vector diag(d);
  const double sd = std::sqrt(2.0);
  for (int i = 0; i < d; ++i) diag[i] = sd * rng.normal();
  const Matrix u = random_orthogonal(rng, d);
  Matrix a = u * diag.asDiagonal() * u.transpose();
  return 0.5 * (a + a.transpose());
}

}  // namespace altmin

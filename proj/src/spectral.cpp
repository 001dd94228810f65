#include "altmin/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <json.hpp>

namespace altmin {

HessianSplit split_hessian(const Matrix& h, const BlockPartition& p, Variant variant) {
  if (h.rows() != p.dim || h.cols() != p.dim)
    throw UsageError("split_hessian: dimension mismatch");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw UsageError("split_hessian: H must be symmetric");

  const int d1 = p.size(1), d2 = p.size(2);
  HessianSplit out;
  out.variant = variant;
  out.upper = Matrix::Zero(p.dim, p.dim);
  out.lower = Matrix::Zero(p.dim, p.dim);
  if (variant == Variant::pagd) {
    out.upper.topLeftCorner(d1, d1) = h.topLeftCorner(d1, d1);
    out.upper.topRightCorner(d1, d2) = h.topRightCorner(d1, d2);
    out.upper.bottomRightCorner(d2, d2) = h.bottomRightCorner(d2, d2);
    out.lower.bottomLeftCorner(d2, d1) = h.bottomLeftCorner(d2, d1);
  } else {
    out.upper.topRightCorner(d1, d2) = h.topRightCorner(d1, d2);
    out.lower.topLeftCorner(d1, d1) = h.topLeftCorner(d1, d1);
    out.lower.bottomLeftCorner(d2, d1) = h.bottomLeftCorner(d2, d1);
    out.lower.bottomRightCorner(d2, d2) = h.bottomRightCorner(d2, d2);
  }
  return out;
}

SweepOperators build_mt(const HessianSplit& split, double eta) {
  if (!(eta > 0.0)) throw UsageError("build_mt: eta must be positive");
  const auto d = split.upper.rows();
  SweepOperators ops;
  ops.m = Matrix::Identity(d, d) + eta * split.lower;
  ops.t = Matrix::Identity(d, d) - eta * split.upper;
  return ops;
}

EigenPairs real_eigs(const Matrix& b) {
  if (b.rows() != b.cols()) throw UsageError("real_eigs: matrix must be square");
  const double bnorm = operator_norm(b);
  EigenPairs out;
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  const bool symmetric = (b - b.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * scale;
  if (symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(b);
    if (es.info() != Eigen::Success) throw NumericalError("real_eigs: symmetric solver failed");
    out.values.reserve(b.rows());
    for (int i = 0; i < b.rows(); ++i) out.values.emplace_back(es.eigenvalues()[i], 0.0);
    out.vectors = es.eigenvectors().cast<std::complex<double>>();
  } else {
    Eigen::EigenSolver<Matrix> es(b);
    if (es.info() != Eigen::Success) throw NumericalError("real_eigs: QR iteration failed");
    out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + b.rows());
    out.vectors = es.eigenvectors();
  }
  for (int j = 0; j < b.rows(); ++j) {
    const Eigen::VectorXcd v = out.vectors.col(j);
    const double resid = (b.cast<std::complex<double>>() * v - out.values[j] * v).norm();
    if (resid > 1e-8 * std::max(bnorm, 1e-300))
      throw NumericalError("real_eigs: eigenpair residual " + std::to_string(resid) +
                           " exceeds tolerance");
  }
  return out;
}

namespace {

double min_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return es.eigenvalues().minCoeff();
}

double tight_block_lmax(const Matrix& h, const BlockPartition& p) {
  const int d1 = p.size(1), d2 = p.size(2);
  return std::max({operator_norm(h.topLeftCorner(d1, d1)),
                   operator_norm(h.bottomRightCorner(d2, d2)),
                   operator_norm(h.topRightCorner(d1, d2))});
}

Vector real_unit_vector(const Eigen::VectorXcd& v) {
  Vector out = v.real();
  const double n = out.norm();
  if (n > 0.0) out /= n;
  return out;
}

}  // namespace

SpectralReport verify_escape_lemma(const Matrix& h, const BlockPartition& p, double eta,
                                   double gamma, double l, double l_max) {
  if (!(gamma > 0.0)) throw UsageError("verify_escape_lemma: gamma must be positive");
  const double lmin = min_eigenvalue(h);
  if (lmin > -gamma + 1e-12 * std::max(1.0, gamma))
    throw UsageError("verify_escape_lemma: lambda_min(H) <= -gamma required, got lambda_min = " +
                     std::to_string(lmin) + " > " + std::to_string(-gamma));

  const auto ops = build_mt(split_hessian(h, p, Variant::pagd), eta);
  // Unit lower-triangular M: form M^{-1}T by forward substitution.
  const Matrix mt = ops.m.triangularView<Eigen::Lower>().solve(ops.t);
  const EigenPairs eig = real_eigs(mt);

  SpectralReport rep;
  rep.variant = Variant::pagd;
  rep.eta_used = eta;
  rep.gamma_used = gamma;
  rep.lemma_bound = 1.0 + eta * gamma / (1.0 + l / l_max);

  int arg = 0;
  for (int j = 1; j < static_cast<int>(eig.values.size()); ++j)
    if (eig.values[j].real() > eig.values[arg].real()) arg = j;
  rep.lambda_max_mt = eig.values[arg].real();
  rep.escape_dir = real_unit_vector(eig.vectors.col(arg));
  rep.slack = rep.lambda_max_mt - rep.lemma_bound;
  rep.pass = rep.slack > 0.0;
  return rep;
}

SpectralReport verify_prox_corollary(const Matrix& h, const BlockPartition& p, double eta,
                                     double gamma) {
  if (!(gamma > 0.0)) throw UsageError("verify_prox_corollary: gamma must be positive");
  const double lmin = min_eigenvalue(h);
  if (lmin > -gamma + 1e-12 * std::max(1.0, gamma))
    throw UsageError("verify_prox_corollary: lambda_min(H) <= -gamma required, got lambda_min = " +
                     std::to_string(lmin) + " > " + std::to_string(-gamma));
  const double l_max = tight_block_lmax(h, p);
  if (eta > (1.0 + 1e-12) / l_max)
    throw UsageError("verify_prox_corollary: eta <= 1/L_max required");
  if (gamma > l_max * (1.0 + 1e-12))
    throw UsageError("verify_prox_corollary: gamma <= L_max required");

  const auto ops = build_mt(split_hessian(h, p, Variant::papp), eta);
  // T' is unit upper-triangular: back substitution for T'^{-1} M'.
  const Matrix tm = ops.t.triangularView<Eigen::Upper>().solve(ops.m);
  const EigenPairs eig = real_eigs(tm);

  SpectralReport rep;
  rep.variant = Variant::papp;
  rep.eta_used = eta;
  rep.gamma_used = gamma;
  rep.corollary_bound = 1.0 - eta * gamma / 2.0;

  const double imag_tol = 1e-8 * std::max(1.0, operator_norm(tm));
  int arg = -1;
  for (int j = 0; j < static_cast<int>(eig.values.size()); ++j) {
    const auto& lam = eig.values[j];
    if (std::abs(lam.imag()) > imag_tol || lam.real() <= 0.0) continue;
    if (arg < 0 || lam.real() < eig.values[arg].real()) arg = j;
  }
  if (arg < 0) {
    rep.indeterminate = true;
    rep.pass = false;
    return rep;
  }
  rep.lambda_min_pos_tm = eig.values[arg].real();
  rep.escape_dir = real_unit_vector(eig.vectors.col(arg));
  rep.slack = rep.corollary_bound - rep.lambda_min_pos_tm;
  rep.pass = rep.slack >= 0.0;
  return rep;
}

IntegralBoundReport integral_hessian_bound_check(const Objective& obj, const BlockPartition& p,
                                                 const Vector& x, const Vector& y, double rho) {
  if (!obj.has_hessian())
    throw UsageError("integral_hessian_bound_check: analytic Hessian required");
  IntegralBoundReport rep;

  // Composite Simpson over theta in [0, 1], 33 nodes (32 intervals); exact
  // for the polynomial-in-theta integrands of the shipped objectives.
  constexpr int kIntervals = 32;
  const double h_step = 1.0 / kIntervals;
  Matrix integral = Matrix::Zero(p.dim, p.dim);
  for (int i = 0; i <= kIntervals; ++i) {
    const double theta = i * h_step;
    const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    integral += w * obj.hessian(theta * x);
  }
  integral *= h_step / 3.0;

  rep.integral_lhs = operator_norm(integral - obj.hessian(y));
  rep.integral_bound = rho * (x.norm() + y.norm());
  rep.integral_slack = rep.integral_bound - rep.integral_lhs;

  // Block-masked Lipschitz variants at (x, y, z) with z the midpoint.
  const Vector z = 0.5 * (x + y);
  const int d1 = p.size(1), d2 = p.size(2);
  const Matrix hx = obj.hessian(x), hy = obj.hessian(y), hz = obj.hessian(z);

  auto upper_mask = [&](const Matrix& own, const Matrix& tail) {
    Matrix m = Matrix::Zero(p.dim, p.dim);
    m.topLeftCorner(d1, d1) = own.topLeftCorner(d1, d1);
    m.topRightCorner(d1, d2) = own.topRightCorner(d1, d2);
    m.bottomRightCorner(d2, d2) = tail.bottomRightCorner(d2, d2);
    return m;
  };
  auto lower_mask = [&](const Matrix& src) {
    Matrix m = Matrix::Zero(p.dim, p.dim);
    m.bottomLeftCorner(d2, d1) = src.bottomLeftCorner(d2, d1);
    return m;
  };

  const double upper_lhs = operator_norm(upper_mask(hx, hy) - upper_mask(hz, hz));
  rep.upper_mask_slack = rho * ((x - z).norm() + (y - z).norm()) - upper_lhs;

  const double lower_lhs = operator_norm(lower_mask(hx) - lower_mask(hy));
  rep.lower_mask_slack = rho * (x - y).norm() - lower_lhs;
  return rep;
}

std::string spectral_report_json(const SpectralReport& r) {
  nlohmann::json j;
  j["variant"] = r.variant == Variant::pagd ? "pagd" : "papp";
  j["eta"] = r.eta_used;
  j["gamma"] = r.gamma_used;
  if (r.variant == Variant::pagd) {
    j["lambda_max_mt"] = r.lambda_max_mt;
    j["lemma_bound"] = r.lemma_bound;
  } else {
    j["lambda_min_pos_tm"] = r.lambda_min_pos_tm;
    j["corollary_bound"] = r.corollary_bound;
  }
  j["slack"] = r.slack;
  j["pass"] = r.pass;
  j["indeterminate"] = r.indeterminate;
  j["escape_dir"] = std::vector<double>(r.escape_dir.data(),
                                        r.escape_dir.data() + r.escape_dir.size());
  return j.dump(2);
}

}  // namespace altmin

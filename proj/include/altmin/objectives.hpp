#pragma once

#include <memory>

#include "altmin/core.hpp"
#include "altmin/random.hpp"

namespace altmin {

/// f(x) = x^T A x with symmetric A. Gradient 2Ax, Hessian 2A.
///
/// The Hessian is constant, so the exact Hessian Lipschitz constant is
/// zero; a caller may declare a larger (still valid) rho when derived
/// algorithm constants require rho > 0.
class QuadraticForm final : public Objective {
 public:
  /// The partition is only used to derive per-block smoothness constants;
  /// it defaults to the midpoint split.
  explicit QuadraticForm(Matrix a, double declared_rho = 0.0);
  QuadraticForm(Matrix a, BlockPartition p, double declared_rho);

  int dim() const override { return static_cast<int>(a_.rows()); }
  double value(const Vector& x) const override { return x.dot(a_ * x); }
  Vector gradient(const Vector& x) const override { return 2.0 * (a_ * x); }
  Vector block_gradient(const BlockPartition& p, int k, const Vector& x) const override;
  bool has_hessian() const override { return true; }
  Matrix hessian(const Vector&) const override { return 2.0 * a_; }
  std::optional<SmoothnessConstants> constants() const override;

  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
  double rho_;
  BlockPartition block_;  // used only to derive per-block constants
};

/// f(x) = x^T A x + (1/4) sum_i x_i^4 with symmetric A.
///
/// On {||x||^2 <= tau} with tau >= lambda_max(A) the function is
/// 5*tau-smooth and 6*sqrt(tau)-Hessian-Lipschitz.
class QuarticSaddle final : public Objective {
 public:
  QuarticSaddle(Matrix a, double tau, BlockPartition p);

  int dim() const override { return static_cast<int>(a_.rows()); }
  double value(const Vector& x) const override {
    return x.dot(a_ * x) + 0.25 * x.array().pow(4).sum();
  }
  Vector gradient(const Vector& x) const override {
    return 2.0 * (a_ * x) + x.array().cube().matrix();
  }
  Vector block_gradient(const BlockPartition& p, int k, const Vector& x) const override;
  bool has_hessian() const override { return true; }
  Matrix hessian(const Vector& x) const override {
    Matrix h = 2.0 * a_;
    h.diagonal() += 3.0 * x.array().square().matrix();
    return h;
  }
  std::optional<SmoothnessConstants> constants() const override { return constants_; }

  const Matrix& matrix() const { return a_; }
  double tau() const { return tau_; }

 private:
  Matrix a_;
  double tau_;
  SmoothnessConstants constants_;
};

/// Smoothness constants of the quartic objective on {||x||^2 <= tau}:
/// L = 5*tau, rho = 6*sqrt(tau). Per-block constants come from the
/// spectral norms of the corresponding blocks of 2A plus the 3*tau
/// diagonal contribution, capped so L_max <= L.
SmoothnessConstants quartic_constants(const Matrix& a, double tau, const BlockPartition& p);

/// f(X, Y) = ||Z - X Y||_F^2 over x = [vec(X); vec(Y)] (column-major),
/// with X: m-by-r as block 1 and Y: r-by-n as block 2.
class MatrixFactorization final : public Objective {
 public:
  MatrixFactorization(Matrix z, int rank);

  int dim() const override { return static_cast<int>(z_.rows() + z_.cols()) * rank_; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  Vector block_gradient(const BlockPartition& p, int k, const Vector& x) const override;

  /// The block split implied by the [vec(X); vec(Y)] layout.
  BlockPartition natural_partition() const {
    return BlockPartition(dim(), static_cast<int>(z_.rows()) * rank_);
  }

  const Matrix& data() const { return z_; }
  int rank() const { return rank_; }

 private:
  Matrix unpack_x(const Vector& v) const;
  Matrix unpack_y(const Vector& v) const;

  Matrix z_;
  int rank_;
};

/// Haar-distributed random orthogonal matrix: QR of a Gaussian matrix with
/// the signs of R's diagonal fixed.
Matrix random_orthogonal(RngStream& rng, int d);

/// A = U D U^T with D diagonal of i.i.d. Gaussian entries (mean 0,
/// variance 2) and U random orthogonal. The output is symmetrized.
Matrix random_saddle_matrix(RngStream& rng, int d);

}  // namespace altmin

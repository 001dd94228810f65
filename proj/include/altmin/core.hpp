#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace altmin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Caller passed arguments that violate a documented precondition.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A configuration failed validation; the message names the failing inequality.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A computation produced non-finite values or an inner solve failed to converge.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Split of the d coordinates into two contiguous blocks:
/// block 1 = [0, split), block 2 = [split, dim).
struct BlockPartition {
  int dim = 0;
  int split = 0;

  BlockPartition() = default;
  BlockPartition(int dim_, int split_) : dim(dim_), split(split_) {
    if (dim < 2) throw UsageError("BlockPartition: dim must be >= 2");
    if (split < 1 || split > dim - 1)
      throw UsageError("BlockPartition: split must lie in [1, dim-1]");
  }

  int offset(int k) const {
    check_block(k);
    return k == 1 ? 0 : split;
  }
  int size(int k) const {
    check_block(k);
    return k == 1 ? split : dim - split;
  }
  /// The complementary block index (1 <-> 2).
  int other(int k) const {
    check_block(k);
    return 3 - k;
  }

  static void check_block(int k) {
    if (k != 1 && k != 2) throw UsageError("block index must be 1 or 2");
  }
};

/// Contiguous sub-vector for block k. Concatenating block 1 and block 2
/// reproduces x.
inline Vector block_read(const Vector& x, const BlockPartition& p, int k) {
  if (x.size() != p.dim) throw UsageError("block_read: dimension mismatch");
  return x.segment(p.offset(k), p.size(k));
}

/// Overwrite block k of x with v.
inline void block_write(Vector& x, const BlockPartition& p, int k, const Vector& v) {
  if (x.size() != p.dim || v.size() != p.size(k))
    throw UsageError("block_write: dimension mismatch");
  x.segment(p.offset(k), p.size(k)) = v;
}

/// Gradient and Hessian Lipschitz constants of an objective.
///
/// l1/l2 bound the block gradient with respect to its own block, lt1/lt2
/// with respect to the complementary block. l_max() never exceeds l.
struct SmoothnessConstants {
  double l = 0.0;    // global gradient Lipschitz constant
  double l1 = 0.0, l2 = 0.0;    // own-block constants
  double lt1 = 0.0, lt2 = 0.0;  // cross-block constants
  double rho = 0.0;  // Hessian Lipschitz constant

  double l_max() const { return std::max({l1, l2, lt1, lt2}); }
};

/// A smooth objective with value, gradient, per-block gradient and an
/// optional analytic Hessian. Instances are immutable after construction
/// and safe to share across threads.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  /// Partial gradient with respect to block k at the assembled point x.
  /// The default slices the full gradient; subclasses may compute the
  /// block directly.
  virtual Vector block_gradient(const BlockPartition& p, int k, const Vector& x) const {
    return block_read(gradient(x), p, k);
  }

  virtual bool has_hessian() const { return false; }
  virtual Matrix hessian(const Vector& /*x*/) const {
    throw UsageError("objective has no analytic Hessian");
  }

  /// Declared smoothness constants, when the problem family provides them.
  virtual std::optional<SmoothnessConstants> constants() const { return std::nullopt; }
};

/// Central-difference gradient, entry i = (f(x+h e_i) - f(x-h e_i)) / (2h).
/// Oracle for validating analytic gradients.
inline Vector finite_diff_grad(const Objective& obj, const Vector& x, double h = 1e-5) {
  if (!(h > 0.0)) throw UsageError("finite_diff_grad: h must be positive");
  Vector g(x.size());
  Vector xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    xp[i] = xi + h;
    const double fp = obj.value(xp);
    xp[i] = xi - h;
    const double fm = obj.value(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Spectral norm (largest singular value) of a dense matrix.
double operator_norm(const Matrix& a);

}  // namespace altmin

#pragma once

#include <complex>
#include <vector>

#include "altmin/constants.hpp"
#include "altmin/core.hpp"

namespace altmin {

/// Additive split of a symmetric Hessian H into the two parts the
/// linearized sweep dynamics see. For the gradient variant the upper part
/// holds blocks (1,1), (1,2), (2,2) and the lower part only block (2,1);
/// for the proximal variant the upper part holds only block (1,2) and the
/// lower part blocks (1,1), (2,1), (2,2). upper + lower == H exactly.
struct HessianSplit {
  Variant variant = Variant::pagd;
  Matrix upper;
  Matrix lower;
};

HessianSplit split_hessian(const Matrix& h, const BlockPartition& p, Variant variant);

/// M = I + eta * lower (unit-diagonal, invertible) and T = I - eta * upper.
struct SweepOperators {
  Matrix m;
  Matrix t;
};

SweepOperators build_mt(const HessianSplit& split, double eta);

struct EigenPairs {
  std::vector<std::complex<double>> values;
  Eigen::MatrixXcd vectors;  // column j pairs with values[j]
};

/// Dense eigendecomposition with a residual guarantee of
/// ||B v - lambda v|| <= 1e-8 ||B|| per pair. Symmetric inputs take the
/// self-adjoint path and come back with exactly real values.
EigenPairs real_eigs(const Matrix& b);

/// Eigenvalue findings for the sweep operators at a strict saddle,
/// compared against the analytic bounds.
struct SpectralReport {
  Variant variant = Variant::pagd;
  double eta_used = 0.0;
  double gamma_used = 0.0;
  // Gradient variant: largest real eigenvalue of M^{-1} T vs the lower
  // bound 1 + eta*gamma / (1 + L/L_max).
  double lambda_max_mt = 0.0;
  double lemma_bound = 0.0;
  // Proximal variant: minimum positive real eigenvalue of T'^{-1} M' vs
  // the upper bound 1 - eta*gamma/2.
  double lambda_min_pos_tm = 0.0;
  double corollary_bound = 0.0;
  Vector escape_dir;  // unit eigenvector attached to the extremal eigenvalue
  bool pass = false;
  bool indeterminate = false;  // no positive eigenvalue found (proximal only)
  double slack = 0.0;          // signed margin, positive = bound satisfied
};

/// Checks lambda_max(M^{-1}T) > 1 + eta*gamma/(1 + L/L_max) at a Hessian
/// with lambda_min(H) <= -gamma and returns the escape direction.
SpectralReport verify_escape_lemma(const Matrix& h, const BlockPartition& p, double eta,
                                   double gamma, double l, double l_max);

/// Checks lambda^+_min(T'^{-1}M') <= 1 - eta*gamma/2 for the proximal
/// operators. Requires eta <= 1/L_max and gamma <= L_max with L_max taken
/// from the block norms of H. When no positive eigenvalue exists the
/// report is flagged indeterminate rather than passed.
SpectralReport verify_prox_corollary(const Matrix& h, const BlockPartition& p, double eta,
                                     double gamma);

/// Quadrature check of the Hessian-integral bound
///   ||int_0^1 H(theta x) dtheta - H(y)|| <= rho (||x|| + ||y||)
/// plus the block-masked Lipschitz variants evaluated at (x, y, midpoint).
/// Slacks are bound minus left-hand side; nonnegative means the inequality
/// holds.
struct IntegralBoundReport {
  double integral_lhs = 0.0;
  double integral_bound = 0.0;
  double integral_slack = 0.0;
  double upper_mask_slack = 0.0;
  double lower_mask_slack = 0.0;
};

IntegralBoundReport integral_hessian_bound_check(const Objective& obj, const BlockPartition& p,
                                                 const Vector& x, const Vector& y, double rho);

std::string spectral_report_json(const SpectralReport& r);

}  // namespace altmin

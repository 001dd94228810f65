#pragma once

#include <cstdint>

#include "altmin/core.hpp"

namespace altmin {

enum class Variant { pagd, papp };

/// User inputs of the perturbed run: (x0, L_max, L, rho, epsilon, delta,
/// delta_f, c). x0 is carried separately by the runner.
struct RunInputs {
  double l_max = 0.0;
  double l = 0.0;
  double rho = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double delta_f = 0.0;  // objective gap f(x0) - f*
  double c = 0.0;        // step-size constant, eta = c / L_max (nu = L_max / c)
};

/// All run constants derived from RunInputs by exact formula substitution.
///
/// PA-GD:  p1 = 1 + L/L_max, p2 = 1 + L*log(2d)/L_max,
///         chi = 6*max{log(p1^6 p2^2 d L_max^{5/3} df / (c^5 rho^{1/3} eps^{7/3} delta)), 4},
///         eta = c/L_max, r = (c^3/chi^3) rho*eps/(L_max p1^3 p2),
///         g_th = c^2 eps/((chi p1)^3 p2),
///         f_th = c^5 eps^2/(L_max (chi p1)^6 p2^2),
///         t_th = ceil(L_max chi p1 / (c^2 (L_max rho eps)^{1/3})).
/// PA-PP uses the single factor p = p2, nu = L_max/c and the same shapes
/// with p1 dropped.
struct DerivedConstants {
  Variant variant = Variant::pagd;
  double p1 = 0.0;
  double p2 = 0.0;
  double chi = 0.0;
  double eta = 0.0;  // step size (PA-GD); for PA-PP this is 1/nu
  double nu = 0.0;   // proximal penalty (PA-PP only; 0 otherwise)
  double r = 0.0;
  double g_th = 0.0;
  double f_th = 0.0;
  std::int64_t t_th = 0;
  /// Iteration count of the headline rate evaluated at these constants,
  /// used to size the default run budget.
  double theoretical_iterations = 0.0;
};

/// Validates RunInputs and computes every derived constant. Violated
/// preconditions raise ConfigError naming the failing inequality.
DerivedConstants derive_constants(const RunInputs& in, int dim, Variant variant);

/// Proof-scale units evaluated at gamma = (L_max rho eps)^{1/3}:
/// objective (f_scale), gradient (g_scale), iterate distance (s_scale) and
/// iteration count (t_scale), plus the condition number kappa = L_max/gamma.
struct ProofScales {
  double gamma = 0.0;
  double kappa = 0.0;
  double f_scale = 0.0;
  double g_scale = 0.0;
  double s_scale = 0.0;
  double t_scale = 0.0;
};

ProofScales proof_scales(const RunInputs& in, int dim);

}  // namespace altmin

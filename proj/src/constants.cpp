#include "altmin/constants.hpp"

#include <cmath>

namespace altmin {

static void validate(const RunInputs& in, int dim) {
  if (dim < 2) throw ConfigError("derive_constants: dim >= 2 required");
  if (!(in.l_max > 0.0)) throw ConfigError("derive_constants: L_max > 0 required");
  if (!(in.l > 0.0)) throw ConfigError("derive_constants: L > 0 required");
  if (in.l_max > in.l * (1.0 + 1e-12))
    throw ConfigError("derive_constants: L_max <= L required, got L_max = " +
                      std::to_string(in.l_max) + " > L = " + std::to_string(in.l));
  if (!(in.rho > 0.0)) throw ConfigError("derive_constants: rho > 0 required");
  if (!(in.c > 0.0 && in.c <= 1.0)) throw ConfigError("derive_constants: 0 < c <= 1 required");
  if (!(in.delta > 0.0 && in.delta <= 1.0))
    throw ConfigError("derive_constants: 0 < delta <= 1 required");
  if (!(in.delta_f > 0.0)) throw ConfigError("derive_constants: delta_f > 0 required");
  if (!(in.epsilon > 0.0)) throw ConfigError("derive_constants: epsilon > 0 required");
  const double cap = in.l_max * in.l_max / in.rho;
  if (in.epsilon > cap * (1.0 + 1e-12))
    throw ConfigError("derive_constants: epsilon <= L_max^2/rho required, got epsilon = " +
                      std::to_string(in.epsilon) + " > " + std::to_string(cap));
}

DerivedConstants derive_constants(const RunInputs& in, int dim, Variant variant) {
  validate(in, dim);
  // proximal descent needs nu = L_max/c >= 3 L_max
  if (variant == Variant::papp && in.c > 1.0 / 3.0 + 1e-12)
    throw ConfigError("derive_constants: c <= 1/3 required for the proximal variant "
                      "(nu >= 3 L_max), got c = " + std::to_string(in.c));
  DerivedConstants out;
  out.variant = variant;
  const double d = static_cast<double>(dim);
  const double lm = in.l_max;
  out.p1 = 1.0 + in.l / lm;
  out.p2 = 1.0 + in.l * std::log(2.0 * d) / lm;

  const double c5 = std::pow(in.c, 5);
  const double eps73 = std::pow(in.epsilon, 7.0 / 3.0);
  const double lm53 = std::pow(lm, 5.0 / 3.0);
  const double rho13 = std::cbrt(in.rho);
  const double gamma = std::cbrt(lm * in.rho * in.epsilon);

  // PA-PP keeps only the log(2d) factor; PA-GD carries both.
  const double pf1 = variant == Variant::pagd ? out.p1 : 1.0;
  const double pf2 = out.p2;

  const double log_arg = std::pow(pf1, 6) * pf2 * pf2 * d * lm53 * in.delta_f /
                         (c5 * rho13 * eps73 * in.delta);
  out.chi = 6.0 * std::max(std::log(log_arg), 4.0);

  out.eta = in.c / lm;
  if (variant == Variant::papp) out.nu = lm / in.c;

  const double chi3 = std::pow(out.chi, 3);
  const double chi_p1_3 = std::pow(out.chi * pf1, 3);
  const double chi_p1_6 = chi_p1_3 * chi_p1_3;

  out.r = (std::pow(in.c, 3) / chi3) * in.rho * in.epsilon / (lm * std::pow(pf1, 3) * pf2);
  out.g_th = in.c * in.c * in.epsilon / (chi_p1_3 * pf2);
  out.f_th = c5 * in.epsilon * in.epsilon / (lm * chi_p1_6 * pf2 * pf2);
  out.t_th = static_cast<std::int64_t>(std::ceil(lm * out.chi * pf1 / (in.c * in.c * gamma)));

  out.theoretical_iterations = std::pow(out.chi * pf1, 7) * pf2 * pf2 / std::pow(in.c, 7) *
                               lm * lm * in.delta_f / (in.epsilon * in.epsilon * gamma);
  return out;
}

ProofScales proof_scales(const RunInputs& in, int dim) {
  validate(in, dim);
  ProofScales s;
  const double lm = in.l_max;
  const double eta = in.c / lm;
  s.gamma = std::cbrt(lm * in.rho * in.epsilon);
  s.kappa = lm / s.gamma;
  const double p1 = 1.0 + in.l / lm;
  const double p2 = 1.0 + in.l * std::log(2.0 * dim) / lm;
  const double lg = std::log(dim * s.kappa / in.delta);
  const double eta_lm = eta * lm;

  s.f_scale = std::pow(eta_lm, 5) * std::pow(s.gamma, 3) /
              (std::pow(s.kappa, 3) * in.rho * in.rho) / std::pow(lg, 6) /
              (std::pow(p1, 6) * p2 * p2);
  s.g_scale = eta_lm * eta_lm * s.gamma * s.gamma / in.rho / std::pow(lg, 3) /
              (std::pow(p1, 3) * p2);
  s.s_scale = eta_lm * eta_lm * s.gamma / (s.kappa * in.rho) / (lg * lg) / (p1 * p1 * p2);
  s.t_scale = lg * p1 / (eta * s.gamma);
  return s;
}

}  // namespace altmin

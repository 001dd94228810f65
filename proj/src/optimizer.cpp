#include "altmin/optimizer.hpp"

#include <cmath>
#include <limits>

namespace altmin {

bool method_is_proximal(Method m) { return m == Method::app || m == Method::papp; }
bool method_is_perturbed(Method m) { return m == Method::pagd || m == Method::papp; }

const char* method_name(Method m) {
  switch (m) {
    case Method::agd: return "agd";
    case Method::pagd: return "pagd";
    case Method::app: return "app";
    case Method::papp: return "papp";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "agd") return Method::agd;
  if (name == "pagd") return Method::pagd;
  if (name == "app") return Method::app;
  if (name == "papp") return Method::papp;
  throw ConfigError("unknown method '" + name + "' (expected agd|pagd|app|papp)");
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::returned_ss2: return "returned_ss2";
    case Termination::max_iters: return "max_iters";
    case Termination::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

RunConstants RunConstants::from_derived(const DerivedConstants& d) {
  RunConstants rc;
  rc.variant = d.variant;
  rc.eta = d.variant == Variant::papp ? 1.0 / d.nu : d.eta;
  rc.nu = d.nu;
  rc.r = d.r;
  rc.g_th = d.g_th;
  rc.f_th = d.f_th;
  rc.t_th = d.t_th;
  return rc;
}

SweepOutcome agd_sweep(const Objective& obj, const BlockPartition& p, const Vector& x,
                       double eta) {
  if (!(eta > 0.0)) throw UsageError("agd_sweep: eta must be positive");
  SweepOutcome out;
  out.x_next = x;
  for (int k = 1; k <= 2; ++k) {
    // h_{-1} = x2 (old), h_{-2} = x1 (fresh): the assembled point already
    // carries the updated block 1 when k = 2.
    const Vector gk = obj.block_gradient(p, k, out.x_next);
    out.block_grad_sq[k - 1] = gk.squaredNorm();
    out.x_next.segment(p.offset(k), p.size(k)) -= eta * gk;
  }
  out.step_sq = eta * eta * out.sum_block_grad_sq();
  return out;
}

namespace {

// Solves argmin_z f(h_{-k}, z) + (nu/2)||z - z0||^2 for block k of `point`
// (other blocks fixed), writing the solution back into `point`. Accepts
// when the fixed-point residual ||z - z0 + (1/nu) grad_k f(h, z)|| is at
// most inner.tolerance.
void prox_block_solve(const Objective& obj, const BlockPartition& p, int k, Vector& point,
                      double nu, const InnerSolveConfig& inner) {
  const int off = p.offset(k);
  const int n = p.size(k);
  const Vector z0 = point.segment(off, n);

  auto phi = [&](const Vector& z) {
    point.segment(off, n) = z;
    return obj.value(point) + 0.5 * nu * (z - z0).squaredNorm();
  };

  Vector z = z0;
  if (obj.has_hessian()) {
    // Damped Newton; the subproblem Hessian H_kk + nu I is positive
    // definite whenever nu exceeds the block smoothness constant. The
    // residual equals ||grad phi|| / nu.
    for (int it = 0; it < inner.max_iters; ++it) {
      point.segment(off, n) = z;
      const Vector g = obj.block_gradient(p, k, point) + nu * (z - z0);
      if (g.norm() <= nu * inner.tolerance) return;
      Matrix h = obj.hessian(point).block(off, off, n, n);
      h.diagonal().array() += nu;
      const Vector dz = -h.ldlt().solve(g);
      const double slope = g.dot(dz);
      const double phi0 = phi(z);
      // Near the solution the predicted decrease sinks below the rounding
      // noise of phi; accept the full Newton step there instead of
      // backtracking against noise.
      const double noise =
          16.0 * std::numeric_limits<double>::epsilon() * (std::abs(phi0) + 1.0);
      double alpha = 1.0;
      while (alpha > 0x1p-40 && phi(z + alpha * dz) > phi0 + 1e-4 * alpha * slope + noise)
        alpha *= 0.5;
      z += alpha * dz;
      if (!all_finite(z)) throw NumericalError("prox_block_solve: non-finite inner iterate");
      point.segment(off, n) = z;
    }
  } else {
    // Fixed-point iteration z <- z0 - (1/nu) grad_k f(h, z); contraction
    // factor L_k / nu. ||z - z_next|| is the fixed-point residual at z, and
    // the residual at the accepted z_next is smaller by the contraction.
    for (int it = 0; it < inner.max_iters; ++it) {
      point.segment(off, n) = z;
      const Vector z_next = z0 - obj.block_gradient(p, k, point) / nu;
      const double resid = (z - z_next).norm();
      z = z_next;
      if (!all_finite(z)) throw NumericalError("prox_block_solve: non-finite inner iterate");
      point.segment(off, n) = z;
      if (resid <= inner.tolerance) return;
    }
  }
  throw NumericalError("prox_block_solve: inner solver failed to reach tolerance " +
                       std::to_string(inner.tolerance) + " within " +
                       std::to_string(inner.max_iters) + " iterations (block " +
                       std::to_string(k) + ")");
}

}  // namespace

SweepOutcome app_sweep(const Objective& obj, const BlockPartition& p, const Vector& x,
                       double nu, const InnerSolveConfig& inner) {
  if (!(nu > 0.0)) throw UsageError("app_sweep: nu must be positive");
  SweepOutcome out;
  out.x_next = x;
  for (int k = 1; k <= 2; ++k) {
    const Vector before = out.x_next.segment(p.offset(k), p.size(k));
    prox_block_solve(obj, p, k, out.x_next, nu, inner);
    const double step_k_sq = (out.x_next.segment(p.offset(k), p.size(k)) - before).squaredNorm();
    // The optimality condition grad_k f(h, x+) = -nu (x+ - x) identifies the
    // block gradient at the accepted point with the scaled step.
    out.block_grad_sq[k - 1] = nu * nu * step_k_sq;
    out.step_sq += step_k_sq;
  }
  return out;
}

RunResult run_optimizer(const Objective& obj, const BlockPartition& p, const Vector& x0,
                        Method method, const RunConstants& rc, const RunControls& ctl,
                        RngStream& rng) {
  if (x0.size() != p.dim || p.dim != obj.dim())
    throw UsageError("run_optimizer: dimension mismatch between x0, partition and objective");
  const bool proximal = method_is_proximal(method);
  const bool perturbed_method = method_is_perturbed(method);
  if (proximal && !(rc.nu > 0.0)) throw ConfigError("run_optimizer: nu > 0 required");
  if (!proximal && !(rc.eta > 0.0)) throw ConfigError("run_optimizer: eta > 0 required");
  if (perturbed_method && rc.t_th < 1)
    throw ConfigError("run_optimizer: t_th >= 1 required for perturbed methods");
  if (ctl.budget < 1) throw ConfigError("run_optimizer: budget >= 1 required");

  auto sweep = [&](const Vector& x) {
    return proximal ? app_sweep(obj, p, x, rc.nu, ctl.inner) : agd_sweep(obj, p, x, rc.eta);
  };
  const double g_th_sq = rc.g_th * rc.g_th;

  RunResult res;
  Vector x = x0;
  // t_p starts one window in the past so a perturbation is permitted at t = 0.
  std::int64_t t_p = -(rc.t_th + 1);
  Vector x_tilde;
  double f_tilde = 0.0;
  bool have_tilde = false;

  double best_f = std::numeric_limits<double>::infinity();
  Vector best_x = x0;

  for (std::int64_t t = 0; t < ctl.budget; ++t) {
    double f_x = obj.value(x);
    if (!std::isfinite(f_x))
      throw NumericalError("run_optimizer: non-finite objective at iteration " +
                           std::to_string(t));

    if (perturbed_method && have_tilde && t - t_p == rc.t_th && f_x - f_tilde > -rc.f_th) {
      SweepOutcome probe = sweep(x);
      res.trace.rows.push_back({t, f_x, probe.sum_block_grad_sq(), obj.gradient(x).norm(),
                                std::sqrt(probe.step_sq), false, true});
      res.trace.termination = Termination::returned_ss2;
      res.result = x_tilde;
      res.result_f = f_tilde;
      res.iterations = t;
      return res;
    }

    SweepOutcome sw = sweep(x);
    bool perturbed_now = false;
    if (perturbed_method && sw.sum_block_grad_sq() <= g_th_sq && t - t_p > rc.t_th) {
      x_tilde = x;
      f_tilde = f_x;
      have_tilde = true;
      t_p = t;
      const Vector xi = sample_uniform_ball(rng, p.dim, rc.r);
      res.trace.events.push_back({t, xi, x_tilde, f_tilde});
      x = x_tilde + xi;
      f_x = obj.value(x);
      sw = sweep(x);
      perturbed_now = true;
    }

    const double grad_norm = obj.gradient(x).norm();
    res.trace.rows.push_back({t, f_x, sw.sum_block_grad_sq(), grad_norm,
                              std::sqrt(sw.step_sq), perturbed_now, false});
    if (ctl.record_path) res.path.push_back(x);
    res.max_norm_sq = std::max(res.max_norm_sq, x.squaredNorm());
    if (f_x < best_f) {
      best_f = f_x;
      best_x = x;
    }
    if (!all_finite(sw.x_next))
      throw NumericalError("run_optimizer: non-finite iterate produced by sweep at iteration " +
                           std::to_string(t));
    x = sw.x_next;
  }

  res.trace.termination =
      ctl.budget_is_user_override ? Termination::max_iters : Termination::budget_exhausted;
  // the final sweep output competes for best-objective as well
  const double f_last = obj.value(x);
  if (std::isfinite(f_last) && f_last < best_f) {
    best_f = f_last;
    best_x = x;
  }
  res.result = best_x;
  res.result_f = best_f;
  res.iterations = ctl.budget;
  return res;
}

}  // namespace altmin

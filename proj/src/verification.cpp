#include "altmin/verification.hpp"

#include <algorithm>
#include <cmath>

namespace altmin {

InequalityLedger check_descent(const Trace& trace, const RunConstants& rc, double tolerance) {
  InequalityLedger ledger;
  ledger.tolerance = tolerance;
  const bool proximal = rc.variant == Variant::papp;
  const char* name = proximal ? "bdescent" : "descent";
  std::size_t next_event = 0;
  for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
    const auto& cur = trace.rows[i];
    const auto& nxt = trace.rows[i + 1];
    // Proximal: (nu/2)||step||^2 = sum_block_grad_sq / (2 nu).
    const double decrease = proximal ? cur.sum_block_grad_sq / (2.0 * rc.nu)
                                     : 0.5 * rc.eta * cur.sum_block_grad_sq;
    double f_next = nxt.f;
    if (nxt.perturbed) {
      // The sweep output at t+1 is the recorded pre-perturbation point.
      while (next_event < trace.events.size() && trace.events[next_event].t < nxt.t)
        ++next_event;
      if (next_event >= trace.events.size() || trace.events[next_event].t != nxt.t) continue;
      f_next = trace.events[next_event].f_tilde;
    }
    ledger.add(name, cur.t, f_next, cur.f - decrease);
  }
  return ledger;
}

InequalityLedger check_grad_ratio(const Trace& trace, double tolerance) {
  InequalityLedger ledger;
  ledger.tolerance = tolerance;
  for (const auto& row : trace.rows) {
    ledger.add("grad_ratio", row.t, row.full_grad_norm * row.full_grad_norm,
               4.0 * row.sum_block_grad_sq);
  }
  return ledger;
}

InequalityLedger check_monotone(const Trace& trace, const RunConstants& rc, double l_max,
                                double tolerance) {
  InequalityLedger ledger;
  ledger.tolerance = tolerance;
  const double jump_bound = std::sqrt(2.0) * rc.g_th * rc.r + 0.5 * l_max * rc.r * rc.r;
  std::size_t next_event = 0;
  for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
    const auto& cur = trace.rows[i];
    const auto& nxt = trace.rows[i + 1];
    if (nxt.perturbed) {
      // f rises at most by the smoothness bound over the pre-perturbation
      // point, whose block gradients passed the g_th trigger.
      while (next_event < trace.events.size() && trace.events[next_event].t < nxt.t)
        ++next_event;
      if (next_event < trace.events.size() && trace.events[next_event].t == nxt.t)
        ledger.add("perturb_jump", nxt.t, nxt.f,
                   trace.events[next_event].f_tilde + jump_bound);
    } else {
      ledger.add("monotone", nxt.t, nxt.f, cur.f);
    }
  }
  return ledger;
}

LipschitzEstimate estimate_lipschitz(const Objective& obj, const BlockPartition& p,
                                     double radius, int n, std::uint64_t seed) {
  if (n < 0) throw UsageError("estimate_lipschitz: n must be nonnegative");
  LipschitzEstimate est;
  RngStream rng(seed);
  const int d = obj.dim();
  for (int i = 0; i < n; ++i) {
    const Vector x = sample_uniform_ball(rng, d, radius);
    const Vector y = sample_uniform_ball(rng, d, radius);
    const double dist = (x - y).norm();
    if (dist > 0.0) {
      est.l = std::max(est.l, (obj.gradient(x) - obj.gradient(y)).norm() / dist);
      if (obj.has_hessian())
        est.rho = std::max(est.rho, operator_norm(obj.hessian(x) - obj.hessian(y)) / dist);
    }
    // Own-block ratios: y with block k replaced by x's block.
    for (int k = 1; k <= 2; ++k) {
      Vector y_own = y;
      y_own.segment(p.offset(k), p.size(k)) = x.segment(p.offset(k), p.size(k));
      const double block_dist = (block_read(y_own, p, k) - block_read(y, p, k)).norm();
      if (block_dist > 0.0) {
        const double ratio =
            (obj.block_gradient(p, k, y_own) - obj.block_gradient(p, k, y)).norm() / block_dist;
        (k == 1 ? est.l1 : est.l2) = std::max(k == 1 ? est.l1 : est.l2, ratio);
      }
      // Cross-block ratios: y with the complementary block replaced.
      Vector y_cross = y;
      const int kc = p.other(k);
      y_cross.segment(p.offset(kc), p.size(kc)) = x.segment(p.offset(kc), p.size(kc));
      const double cross_dist = (block_read(y_cross, p, kc) - block_read(y, p, kc)).norm();
      if (cross_dist > 0.0) {
        const double ratio =
            (obj.block_gradient(p, k, y_cross) - obj.block_gradient(p, k, y)).norm() / cross_dist;
        (k == 1 ? est.lt1 : est.lt2) = std::max(k == 1 ? est.lt1 : est.lt2, ratio);
      }
    }
  }
  return est;
}

static double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * v[lo] + w * v[hi];
}

EscapeStudy escape_probability_study(const Objective& obj, const BlockPartition& p,
                                     const Vector& saddle, Method method,
                                     const RunConstants& rc, const RunControls& ctl,
                                     int n_seeds, std::uint64_t base_seed, double init_radius) {
  EscapeStudy study;
  study.n_seeds = n_seeds;
  if (n_seeds <= 0) return study;
  if (!method_is_perturbed(method))
    throw UsageError("escape_probability_study: method must be pagd or papp");

  std::vector<double> escape_iters;
  for (int i = 0; i < n_seeds; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    RngStream rng(seed);
    Vector x0 = saddle;
    if (init_radius > 0.0) x0 += sample_uniform_ball(rng, p.dim, init_radius);

    EscapeStudy::SeedOutcome out;
    out.seed = seed;
    const RunResult res = run_optimizer(obj, p, x0, method, rc, ctl, rng);
    if (!res.trace.events.empty()) {
      const auto& ev = res.trace.events.front();
      out.perturbation_seen = true;
      out.t_p = ev.t;
      const std::int64_t window_end = ev.t + rc.t_th;
      for (const auto& row : res.trace.rows) {
        if (row.t < ev.t || row.t > window_end) continue;
        const double decrease = row.f - ev.f_tilde;
        if (row.t == window_end) {
          out.window_decrease = decrease;
          out.escaped = decrease <= -rc.f_th;
        }
        if (out.iters_to_escape < 0 && decrease <= -rc.f_th) out.iters_to_escape = row.t - ev.t;
      }
    }
    if (out.escaped) {
      ++study.n_escaped;
      if (out.iters_to_escape >= 0) escape_iters.push_back(double(out.iters_to_escape));
    }
    study.outcomes.push_back(std::move(out));
  }
  study.escape_rate = double(study.n_escaped) / double(n_seeds);
  study.iters_q25 = quantile(escape_iters, 0.25);
  study.iters_q50 = quantile(escape_iters, 0.50);
  study.iters_q75 = quantile(escape_iters, 0.75);
  return study;
}

}  // namespace altmin

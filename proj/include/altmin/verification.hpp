#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "altmin/core.hpp"
#include "altmin/optimizer.hpp"

namespace altmin {

/// One recorded inequality evaluation: slack = rhs - lhs, so the checked
/// inequality lhs <= rhs holds exactly when slack >= 0 and a violation is
/// slack < -tolerance.
struct InequalityRecord {
  std::string check;
  std::int64_t index = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

/// Append-only ledger of inequality evaluations from one trace or study.
struct InequalityLedger {
  double tolerance = 1e-10;
  std::vector<InequalityRecord> records;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::int64_t violations = 0;

  void add(const std::string& check, std::int64_t index, double lhs, double rhs) {
    const double slack = rhs - lhs;
    records.push_back({check, index, lhs, rhs, slack});
    worst_slack = std::min(worst_slack, slack);
    if (slack < -tolerance) ++violations;
  }
  bool clean() const { return violations == 0; }
};

/// Per-sweep descent inequality. Gradient runs check
///   f(x^{t+1}) <= f(x^t) - (eta/2) * sum_k ||grad_k f(h_{-k}, x_k)||^2,
/// proximal runs the penalized form with nu/2 times the squared step.
/// Pairs whose successor row was perturbed are excluded.
InequalityLedger check_descent(const Trace& trace, const RunConstants& rc,
                               double tolerance = 1e-10);

/// Per-sweep gradient ratio
///   ||grad f(x^t)||^2 <= 4 * sum_k ||grad_k f(h_{-k}, x_k)||^2
/// (the proximal sum equals nu^2 ||x^{t+1} - x^t||^2).
InequalityLedger check_grad_ratio(const Trace& trace, double tolerance = 1e-10);

/// Objective monotonicity between consecutive rows except across
/// perturbations; perturbation jumps are checked against the smoothness
/// bound sqrt(2) * g_th * r + (L_max/2) r^2.
InequalityLedger check_monotone(const Trace& trace, const RunConstants& rc, double l_max,
                                double tolerance = 1e-10);

/// Max sampled Lipschitz ratios over n random pairs in the centered ball
/// of the given radius. Estimates grow monotonically in n for a fixed
/// seed.
struct LipschitzEstimate {
  double l = 0.0;
  double l1 = 0.0, l2 = 0.0;
  double lt1 = 0.0, lt2 = 0.0;
  double rho = 0.0;
};

LipschitzEstimate estimate_lipschitz(const Objective& obj, const BlockPartition& p,
                                     double radius, int n, std::uint64_t seed);

/// Monte-Carlo escape study: n_seeds perturbed runs started init_radius
/// from the given point, each inspected over its first perturbation
/// window. Escape means f(x^{t_p + t_th}) - f(x_tilde) <= -f_th.
struct EscapeStudy {
  struct SeedOutcome {
    std::uint64_t seed = 0;
    bool perturbation_seen = false;
    bool escaped = false;
    std::int64_t t_p = -1;
    double window_decrease = 0.0;
    std::int64_t iters_to_escape = -1;  // first t - t_p with decrease <= -f_th
  };
  std::vector<SeedOutcome> outcomes;
  int n_seeds = 0;
  int n_escaped = 0;
  double escape_rate = 0.0;
  double iters_q25 = 0.0, iters_q50 = 0.0, iters_q75 = 0.0;
};

EscapeStudy escape_probability_study(const Objective& obj, const BlockPartition& p,
                                     const Vector& saddle, Method method,
                                     const RunConstants& rc, const RunControls& ctl,
                                     int n_seeds, std::uint64_t base_seed, double init_radius);

}  // namespace altmin

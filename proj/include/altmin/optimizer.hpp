#pragma once

#include <cstdint>
#include <vector>

#include "altmin/constants.hpp"
#include "altmin/core.hpp"
#include "altmin/random.hpp"

namespace altmin {

enum class Method { agd, pagd, app, papp };

bool method_is_proximal(Method m);
bool method_is_perturbed(Method m);
const char* method_name(Method m);
Method method_from_name(const std::string& name);

/// Inner-solve controls for the proximal block subproblem. The solve stops
/// when the fixed-point residual ||x+ - x + (1/nu) grad_k f(h, x+)|| drops
/// below tolerance.
struct InnerSolveConfig {
  double tolerance = 1e-12;
  int max_iters = 200;
};

/// Result of one alternating sweep. block_grad_sq holds the squared norms
/// of the block gradients evaluated at the points actually used; for
/// proximal sweeps these are nu^2 times the squared block steps.
struct SweepOutcome {
  Vector x_next;
  double block_grad_sq[2] = {0.0, 0.0};
  double step_sq = 0.0;

  double sum_block_grad_sq() const { return block_grad_sq[0] + block_grad_sq[1]; }
};

/// One AGD sweep: x1+ = x1 - eta * grad_1 f(x1, x2) first, then
/// x2+ = x2 - eta * grad_2 f(x1+, x2) with the fresh block 1.
SweepOutcome agd_sweep(const Objective& obj, const BlockPartition& p, const Vector& x,
                       double eta);

/// One proximal sweep: block k solves
///   argmin_z f(h_{-k}, z) + (nu/2) ||z - x_k||^2
/// sequentially, block 2 seeing the updated block 1. Damped Newton when an
/// analytic Hessian exists, fixed-point iteration otherwise.
SweepOutcome app_sweep(const Objective& obj, const BlockPartition& p, const Vector& x,
                       double nu, const InnerSolveConfig& inner = {});

/// Run constants, either derived per the algorithm input line or supplied
/// manually (figure-caption experiments).
struct RunConstants {
  Variant variant = Variant::pagd;
  double eta = 0.0;  // step size; for proximal runs eta = 1/nu
  double nu = 0.0;   // proximal penalty (proximal runs only)
  double r = 0.0;
  double g_th = 0.0;
  double f_th = 0.0;
  std::int64_t t_th = 0;

  static RunConstants from_derived(const DerivedConstants& d);
};

struct RunControls {
  std::int64_t budget = 100000;
  bool budget_is_user_override = false;
  InnerSolveConfig inner;
  bool record_path = false;  // store iterates (2D plots and trajectory dumps)
};

enum class Termination { returned_ss2, max_iters, budget_exhausted };
const char* termination_name(Termination t);

struct TraceRow {
  std::int64_t t = 0;
  double f = 0.0;
  double sum_block_grad_sq = 0.0;
  double full_grad_norm = 0.0;
  double step_norm = 0.0;
  bool perturbed = false;
  bool returned = false;
};

struct PerturbationEvent {
  std::int64_t t = 0;
  Vector xi;
  Vector x_tilde;
  double f_tilde = 0.0;
};

/// Full iterate history of one run. Rows describe the iterate each sweep
/// started from (after the perturbation, when one fired at that t); events
/// record the pre-perturbation point.
struct Trace {
  std::vector<TraceRow> rows;
  std::vector<PerturbationEvent> events;
  Termination termination = Termination::budget_exhausted;
};

struct RunResult {
  Trace trace;
  Vector result;       // returned point: x_tilde on a return, else best iterate
  double result_f = 0.0;
  std::int64_t iterations = 0;
  double max_norm_sq = 0.0;  // post-hoc domain-ball diagnostic
  std::vector<Vector> path;  // iterates, when record_path is set
};

/// Perturbed (or plain) alternating run. Plain methods (agd/app) execute
/// the same sweep loop with the perturbation and return rules disabled and
/// stop only at the budget.
RunResult run_optimizer(const Objective& obj, const BlockPartition& p, const Vector& x0,
                        Method method, const RunConstants& rc, const RunControls& ctl,
                        RngStream& rng);

}  // namespace altmin

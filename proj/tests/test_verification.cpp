#include <doctest.h>

#include <cmath>

#include "altmin/objectives.hpp"
#include "altmin/verification.hpp"

using namespace altmin;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

RunConstants quartic_caption_constants() {
  RunConstants rc;
  rc.variant = Variant::pagd;
  rc.eta = 0.02;
  rc.r = 1e-5;
  rc.g_th = 1e-5;
  rc.f_th = 1e-30;
  rc.t_th = 2155;
  return rc;
}

}  // namespace

TEST_CASE("descent ledger is clean on a stationary trace") {
  const BlockPartition p(2, 1);
  const QuarticSaddle obj(mat2(1, 2, 2, 1), 3.0, p);
  const RunConstants rc = quartic_caption_constants();
  RunControls ctl;
  ctl.budget = 100;
  RngStream rng(1);
  const double s = std::sqrt(2.0);
  Vector x0(2);
  x0 << s, -s;
  const RunResult res = run_optimizer(obj, p, x0, Method::agd, rc, ctl, rng);
  const auto ledger = check_descent(res.trace, rc);
  CHECK(ledger.clean());
  for (const auto& rec : ledger.records) {
    CHECK(rec.lhs == doctest::Approx(rec.rhs).epsilon(1e-12));
  }
}

TEST_CASE("descent and gradient-ratio ledgers are clean on perturbed quartic runs") {
  const BlockPartition p(2, 1);
  const QuarticSaddle obj(mat2(1, 2, 2, 1), 3.0, p);
  const RunConstants rc = quartic_caption_constants();
  RunControls ctl;
  ctl.budget = 8000;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    RngStream rng(seed);
    Vector x0 = sample_uniform_ball(rng, 2, 1e-3);
    const RunResult res = run_optimizer(obj, p, x0, Method::pagd, rc, ctl, rng);
    CHECK(check_descent(res.trace, rc).clean());
    CHECK(check_grad_ratio(res.trace).clean());
  }
}

TEST_CASE("descent checker reports violations for an oversized step") {
  // With eta = 2/L_max the within-block expansion exceeds the descent
  // budget whenever the diagonal curvature dominates half the off-diagonal.
  const QuadraticForm obj(mat2(1.5, 2, 2, 1.5));
  const BlockPartition p(2, 1);
  RunConstants rc;
  rc.variant = Variant::pagd;
  rc.eta = 2.0 / obj.constants()->l_max();
  RunControls ctl;
  ctl.budget = 12;
  RngStream rng(3);
  Vector x0(2);
  x0 << 1, 1;
  const RunResult res = run_optimizer(obj, p, x0, Method::agd, rc, ctl, rng);
  const auto ledger = check_descent(res.trace, rc);
  CHECK(ledger.violations > 0);
  CHECK(ledger.worst_slack < -1e-10);
}

TEST_CASE("proximal descent ledger is clean with nu >= 3 L_max") {
  const BlockPartition p(2, 1);
  const QuarticSaddle obj(mat2(1, 2, 2, 1), 3.0, p);
  RunConstants rc;
  rc.variant = Variant::papp;
  rc.nu = 3.0 * obj.constants()->l_max();
  rc.eta = 1.0 / rc.nu;
  rc.r = 1e-5;
  rc.g_th = 1e-5;
  rc.f_th = 1e-30;
  rc.t_th = 500;
  RunControls ctl;
  ctl.budget = 1200;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RngStream rng(seed);
    Vector x0 = sample_uniform_ball(rng, 2, 1e-2);
    const RunResult res = run_optimizer(obj, p, x0, Method::papp, rc, ctl, rng);
    CHECK(check_descent(res.trace, rc).clean());
    CHECK(check_grad_ratio(res.trace).clean());
  }
}

TEST_CASE("monotonicity holds away from perturbations and jumps stay bounded") {
  const BlockPartition p(2, 1);
  const QuarticSaddle obj(mat2(1, 2, 2, 1), 3.0, p);
  const RunConstants rc = quartic_caption_constants();
  RunControls ctl;
  ctl.budget = 8000;
  RngStream rng(11);
  Vector x0 = sample_uniform_ball(rng, 2, 1e-3);
  const RunResult res = run_optimizer(obj, p, x0, Method::pagd, rc, ctl, rng);
  REQUIRE_FALSE(res.trace.events.empty());
  const auto ledger = check_monotone(res.trace, rc, obj.constants()->l_max());
  CHECK(ledger.clean());
}

TEST_CASE("lipschitz estimates vanish for a linear objective") {
  struct LinearObjective final : Objective {
    int dim() const override { return 3; }
    double value(const Vector& x) const override { return x.sum(); }
    Vector gradient(const Vector&) const override { return Vector::Ones(3); }
  };
  const LinearObjective obj;
  const BlockPartition p(3, 1);
  const auto est = estimate_lipschitz(obj, p, 1.0, 200, 5);
  CHECK(est.l == 0.0);
  CHECK(est.l1 == 0.0);
  CHECK(est.lt2 == 0.0);
  CHECK(est.rho == 0.0);
}

TEST_CASE("quartic estimates stay below the declared constants") {
  const BlockPartition p(2, 1);
  const double tau = 3.0;
  const QuarticSaddle obj(mat2(1, 2, 2, 1), tau, p);
  const auto est = estimate_lipschitz(obj, p, std::sqrt(tau), 10000, 99);
  CHECK(est.l <= 15.0);
  CHECK(est.rho <= 6.0 * std::sqrt(tau));
  const auto c = *obj.constants();
  CHECK(est.l1 <= c.l1 + 1e-9);
  CHECK(est.l2 <= c.l2 + 1e-9);
  CHECK(est.lt1 <= c.lt1 + 1e-9);
  CHECK(est.lt2 <= c.lt2 + 1e-9);
}

TEST_CASE("quadratic estimate converges to the spectral norm of 2A") {
  const QuadraticForm obj(mat2(1, 2, 2, 1));
  const BlockPartition p(2, 1);
  const auto est = estimate_lipschitz(obj, p, 1.0, 10000, 7);
  CHECK(est.l <= 6.0 + 1e-12);
  CHECK(est.l >= 0.95 * 6.0);
}

TEST_CASE("lipschitz estimates are monotone in the sample count") {
  const BlockPartition p(2, 1);
  const QuarticSaddle obj(mat2(1, 2, 2, 1), 3.0, p);
  const auto small = estimate_lipschitz(obj, p, 1.0, 100, 42);
  const auto large = estimate_lipschitz(obj, p, 1.0, 1000, 42);
  CHECK(large.l >= small.l);
  CHECK(large.l1 >= small.l1);
  CHECK(large.lt1 >= small.lt1);
  CHECK(large.rho >= small.rho);
}

TEST_CASE("escape study with zero seeds is empty") {
  const QuadraticForm obj(mat2(1, 2, 2, 1));
  const BlockPartition p(2, 1);
  const RunConstants rc = quartic_caption_constants();
  RunControls ctl;
  const auto study =
      escape_probability_study(obj, p, Vector::Zero(2), Method::pagd, rc, ctl, 0, 1, 0.0);
  CHECK(study.outcomes.empty());
  CHECK(study.n_escaped == 0);
}

TEST_CASE("pagd escapes the quadratic saddle in at least 95 of 100 seeds") {
  const QuadraticForm obj(mat2(1, 2, 2, 1));
  const BlockPartition p(2, 1);
  const RunConstants rc = quartic_caption_constants();
  RunControls ctl;
  ctl.budget = rc.t_th + 3;
  const auto study =
      escape_probability_study(obj, p, Vector::Zero(2), Method::pagd, rc, ctl, 100, 1000, 0.0);
  CHECK(study.n_seeds == 100);
  CHECK(study.escape_rate >= 0.95);
  CHECK(study.iters_q50 <= rc.t_th);

  // reproducibility: identical seed list, identical rates
  const auto replay =
      escape_probability_study(obj, p, Vector::Zero(2), Method::pagd, rc, ctl, 100, 1000, 0.0);
  CHECK(replay.escape_rate == study.escape_rate);
  CHECK(replay.iters_q50 == study.iters_q50);
}

TEST_CASE("papp escapes the quadratic saddle in at least 90 of 100 seeds") {
  const QuadraticForm obj(mat2(1, 2, 2, 1));
  const BlockPartition p(2, 1);
  RunConstants rc;
  rc.variant = Variant::papp;
  rc.nu = 12.0;  // 3 L_max
  rc.eta = 1.0 / rc.nu;
  rc.r = 1e-5;
  rc.g_th = 1e-5;
  rc.f_th = 1e-8;
  rc.t_th = 150;
  RunControls ctl;
  ctl.budget = rc.t_th + 3;
  // iterates grow geometrically after the kick; looser inner tolerance
  // keeps the absolute residual target attainable at those scales
  ctl.inner.tolerance = 1e-9;
  const auto study =
      escape_probability_study(obj, p, Vector::Zero(2), Method::papp, rc, ctl, 100, 2000, 0.0);
  CHECK(study.escape_rate >= 0.90);
}

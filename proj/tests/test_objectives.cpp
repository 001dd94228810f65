#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "altmin/objectives.hpp"
#include "altmin/random.hpp"

using namespace altmin;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("quartic value, gradient and Hessian at pinned points") {
  const BlockPartition p(2, 1);
  const QuarticSaddle q(mat2(1, 2, 2, 1), 3.0, p);

  // origin is a stationary point
  CHECK(q.value(vec2(0, 0)) == 0.0);
  CHECK(q.gradient(vec2(0, 0)).norm() == 0.0);

  // f(1,0) = 1 + 1/4, grad = (2*1 + 1, 2*2 + 0)
  CHECK(q.value(vec2(1, 0)) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(q.gradient(vec2(1, 0)).isApprox(vec2(3, 4), 1e-14));

  // solving 2Ax + x^3 = 0 along the (1,-1) eigendirection gives (sqrt 2, -sqrt 2)
  const double s = std::sqrt(2.0);
  CHECK(q.gradient(vec2(s, -s)).norm() < 1e-14);
  CHECK(q.value(vec2(s, -s)) == doctest::Approx(-2.0).epsilon(1e-14));

  const Matrix h = q.hessian(vec2(1, 0));
  CHECK(h(0, 0) == doctest::Approx(2.0 + 3.0));
  CHECK(h(0, 1) == doctest::Approx(4.0));
  CHECK(h(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("quartic smoothness constants") {
  const BlockPartition p(2, 1);
  SUBCASE("pinned example A=[[1,2],[2,1]], tau=3") {
    const auto c = quartic_constants(mat2(1, 2, 2, 1), 3.0, p);
    CHECK(c.l == doctest::Approx(15.0));
    CHECK(c.rho == doctest::Approx(6.0 * std::sqrt(3.0)));
    CHECK(c.l_max() <= c.l);
    // diagonal blocks: 2*1 + 3*tau = 11; off-diagonal: 2*2 = 4
    CHECK(c.l1 == doctest::Approx(11.0));
    CHECK(c.lt1 == doctest::Approx(4.0));
  }
  SUBCASE("A = 0, tau = 1") {
    const auto c = quartic_constants(Matrix::Zero(2, 2), 1.0, p);
    CHECK(c.l == doctest::Approx(5.0));
    CHECK(c.rho == doctest::Approx(6.0));
  }
  SUBCASE("tau below lambda_max is rejected") {
    CHECK_THROWS_AS(quartic_constants(mat2(1, 2, 2, 1), 2.0, p), UsageError);
  }
}

TEST_CASE("sampled gradient-Lipschitz ratio never exceeds 5 tau") {
  RngStream rng(2024);
  const int d = 4;
  const Matrix a = random_saddle_matrix(rng, d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const double tau = std::max(es.eigenvalues().maxCoeff(), 0.5);
  const BlockPartition p(d, 2);
  const QuarticSaddle q(a, tau, p);
  const double radius = std::sqrt(tau);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vector x = sample_uniform_ball(rng, d, radius);
    const Vector y = sample_uniform_ball(rng, d, radius);
    const double dist = (x - y).norm();
    if (dist > 0) worst = std::max(worst, (q.gradient(x) - q.gradient(y)).norm() / dist);
  }
  CHECK(worst <= 5.0 * tau);
}

TEST_CASE("quartic Hessian-Lipschitz ratio never exceeds 6 sqrt(tau)") {
  const BlockPartition p(2, 1);
  const double tau = 3.0;
  const QuarticSaddle q(mat2(1, 2, 2, 1), tau, p);
  RngStream rng(31337);
  const double radius = std::sqrt(tau);
  for (int i = 0; i < 1000; ++i) {
    const Vector x = sample_uniform_ball(rng, 2, radius);
    const Vector y = sample_uniform_ball(rng, 2, radius);
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    CHECK(operator_norm(q.hessian(x) - q.hessian(y)) <= 6.0 * std::sqrt(tau) * dist + 1e-12);
  }
}

TEST_CASE("quadratic saddle Hessian has eigenvalues -2 and 6") {
  const QuadraticForm q(mat2(1, 2, 2, 1));
  Eigen::SelfAdjointEigenSolver<Matrix> es(q.hessian(vec2(0, 0)));
  CHECK(es.eigenvalues()[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(es.eigenvalues()[1] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("random saddle matrix construction") {
  RngStream rng(7);
  SUBCASE("symmetry") {
    for (int i = 0; i < 5; ++i) {
      const Matrix a = random_saddle_matrix(rng, 10);
      CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("every d=100 draw has a negative eigenvalue") {
    // the probability of 100 i.i.d. N(0,2) diagonal entries all positive is 2^-100
    int with_negative = 0;
    for (int i = 0; i < 20; ++i) {
      const Matrix a = random_saddle_matrix(rng, 100);
      Eigen::SelfAdjointEigenSolver<Matrix> es(a);
      if (es.eigenvalues().minCoeff() < 0.0) ++with_negative;
    }
    CHECK(with_negative == 20);
  }
  SUBCASE("spectrum equals the diagonal draw up to ordering") {
    // replay the stream: the diagonal is drawn before the orthogonal factor
    RngStream replay(555);
    Vector expected(8);
    for (int i = 0; i < 8; ++i) expected[i] = std::sqrt(2.0) * replay.normal();
    RngStream gen(555);
    const Matrix a = random_saddle_matrix(gen, 8);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    std::sort(expected.data(), expected.data() + 8);
    CHECK((es.eigenvalues() - expected).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("random orthogonal matrices are orthogonal") {
  RngStream rng(8);
  for (int d : {3, 20}) {
    const Matrix u = random_orthogonal(rng, d);
    CHECK((u * u.transpose() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("matrix factorization objective") {
  RngStream rng(13);
  Matrix x0(3, 2), y0(2, 4);
  for (int i = 0; i < x0.size(); ++i) x0.data()[i] = rng.normal();
  for (int i = 0; i < y0.size(); ++i) y0.data()[i] = rng.normal();
  const Matrix z = x0 * y0;
  MatrixFactorization mf(z, 2);
  const BlockPartition p = mf.natural_partition();

  SUBCASE("exact factorization is the global minimum") {
    Vector v(mf.dim());
    Eigen::Map<Matrix>(v.data(), 3, 2) = x0;
    Eigen::Map<Matrix>(v.data() + 6, 2, 4) = y0;
    CHECK(mf.value(v) <= 1e-24);
    CHECK(mf.gradient(v).norm() <= 1e-11);
  }

  SUBCASE("X = 0 leaves only the data term") {
    Vector v = Vector::Zero(mf.dim());
    Eigen::Map<Matrix>(v.data() + 6, 2, 4) = y0;
    CHECK(mf.value(v) == doctest::Approx(z.squaredNorm()).epsilon(1e-12));
    // grad_X = -2 Z Y^T, grad_Y = 0
    const Vector g = mf.gradient(v);
    const Matrix gx_expected = -2.0 * z * y0.transpose();
    CHECK(Eigen::Map<const Matrix>(g.data(), 3, 2).isApprox(gx_expected, 1e-12));
    CHECK(g.tail(8).norm() == 0.0);
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(mf.value(Vector::Zero(5)), UsageError);
    CHECK_THROWS_AS(mf.block_gradient(BlockPartition(14, 7), 1, Vector::Zero(14)), UsageError);
  }
}

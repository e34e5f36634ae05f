#include <doctest.h>

#include <cmath>
#include <random>

#include "slideopt/benchmarks.hpp"
#include "slideopt/problem.hpp"

using namespace slideopt;

namespace {

Problem scalar_quadratic(double w) {
  Problem p;
  p.name = "scalar";
  p.dim_x = 1;
  p.dim_h = 1;
  p.objective = [w](const Vec& x) { return 0.5 * w * x(0) * x(0); };
  p.constraints = [](const Vec& x) { return x; };
  p.linear_constraints = true;
  return p;
}

Problem indefinite_qp(double c0, double c1) {
  Problem p;
  p.name = "qp";
  p.dim_x = 2;
  p.dim_h = 1;
  p.objective = [](const Vec& x) {
    return 0.5 * (x(0) * x(0) - x(1) * x(1));
  };
  p.gradient = [](const Vec& x) { return Vec(Eigen::Vector2d(x(0), -x(1))); };
  p.constraints = [c0, c1](const Vec& x) {
    return Vec::Constant(1, c0 * x(0) + c1 * x(1));
  };
  p.jacobian = [c0, c1](const Vec&) {
    Mat j(1, 2);
    j << c0, c1;
    return j;
  };
  p.linear_constraints = true;
  return p;
}

}  // namespace

TEST_CASE("lagrangian hand example") {
  const Problem p = scalar_quadratic(1.0);
  CHECK(lagrangian(p, Vec::Constant(1, 2.0), Vec::Constant(1, -1.0)) ==
        doctest::Approx(0.0));
  CHECK(lagrangian(p, Vec::Constant(1, 2.0), Vec::Constant(1, 0.0)) ==
        doctest::Approx(2.0));
}

TEST_CASE("fonc residuals") {
  const Problem p = scalar_quadratic(1.0);
  const auto r = fonc_residuals(p, Vec::Constant(1, 1.0), Vec::Zero(1));
  CHECK(r.stationarity == doctest::Approx(1.0));
  CHECK(r.feasibility == doctest::Approx(1.0));
  const auto z = fonc_residuals(p, Vec::Zero(1), Vec::Zero(1));
  CHECK(z.stationarity == 0.0);
  CHECK(z.feasibility == 0.0);
}

TEST_CASE("sonc on the indefinite QP") {
  CHECK(sonc_check(indefinite_qp(0, 2), Vec::Zero(2), Vec::Zero(1), 1e-9));
  CHECK_FALSE(
      sonc_check(indefinite_qp(2, 0), Vec::Zero(2), Vec::Zero(1), 1e-9));
}

TEST_CASE("sonc rejects a rank-deficient Jacobian") {
  CHECK_THROWS_AS(
      sonc_check(indefinite_qp(0, 0), Vec::Zero(2), Vec::Zero(1), 1e-9),
      RankDeficientError);
}

TEST_CASE("sonc is vacuous for a square nonsingular Jacobian") {
  Problem p = indefinite_qp(1, 0);
  p.dim_h = 2;
  p.constraints = [](const Vec& x) { return x; };
  p.jacobian = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
  CHECK(sonc_check(p, Vec::Zero(2), Vec::Zero(2), 1e-9));
}

TEST_CASE("finite-difference fallbacks agree with closed forms") {
  const Problem p = scalar_quadratic(3.0);
  const Vec x = Vec::Constant(1, 0.7);
  CHECK(p.grad(x)(0) == doctest::Approx(2.1).epsilon(1e-7));
  CHECK(p.jac(x)(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.hess_phi(x)(0, 0) == doctest::Approx(3.0).epsilon(1e-5));
  CHECK(p.hess_h(x)[0](0, 0) == 0.0);
}

TEST_CASE("constraint Hessians by differences of the Jacobian") {
  Problem p;
  p.name = "circle";
  p.dim_x = 2;
  p.dim_h = 1;
  p.objective = [](const Vec& x) { return x.squaredNorm(); };
  p.constraints = [](const Vec& x) {
    return Vec::Constant(1, x.squaredNorm() - 1.0);
  };
  const auto H = p.hess_h(Eigen::Vector2d(0.3, -0.4));
  CHECK((H[0] - 2.0 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("dimension mismatches are reported") {
  const Problem p = scalar_quadratic(1.0);
  CHECK_THROWS_AS(p.h(Vec::Zero(2)), DimensionError);
  CHECK_THROWS_AS(lagrangian(p, Vec::Zero(1), Vec::Zero(3)), DimensionError);

  Problem bad = scalar_quadratic(1.0);
  bad.constraints = [](const Vec&) { return Vec(Vec::Zero(2)); };
  CHECK_THROWS_AS(bad.validate(Vec::Zero(1)), DimensionError);
}

TEST_CASE("multiplier estimate makes the Lagrangian gradient vanish") {
  // Oracle: at a KKT point grad phi + J^T lam = 0 exactly.
  const Problem p = indefinite_qp(1, 1);
  const Vec x = Eigen::Vector2d(0.5, -0.5);
  const Vec lam = multiplier_estimate(p, x);
  // grad = (0.5, 0.5), J = [1 1] -> lam = -0.5.
  CHECK(lam(0) == doctest::Approx(-0.5));
  CHECK(fonc_residuals(p, x, lam).stationarity < 1e-12);
}

TEST_CASE("KktPoint::evaluate fills residuals") {
  const Problem p = scalar_quadratic(1.0);
  const auto k = KktPoint::evaluate(p, Vec::Zero(1), Vec::Zero(1));
  CHECK(k.stationarity_residual == 0.0);
  CHECK(k.feasibility_residual == 0.0);
}

TEST_CASE("analytic derivatives of every benchmark match differences") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& name : benchmark_names()) {
    CAPTURE(name);
    const BenchmarkCase b = make_benchmark(name);
    const Problem& p = b.problem;
    for (int trial = 0; trial < 20; ++trial) {
      Vec x(p.dim_x);
      for (int i = 0; i < p.dim_x; ++i) x(i) = u(rng);
      if (name == "shidoku") x.array() += 2.5;
      const Mat jfd = fd_jacobian(
          [&p](const Vec& v) { return p.h(v); }, x, 1e-6);
      const Mat j = p.jac(x);
      CHECK((j - jfd).cwiseAbs().maxCoeff() <=
            1e-5 * std::max(1.0, j.cwiseAbs().maxCoeff()));
      Vec gfd(p.dim_x);
      for (int i = 0; i < p.dim_x; ++i) {
        Vec a = x, c = x;
        a(i) += 1e-6;
        c(i) -= 1e-6;
        gfd(i) = (p.phi(a) - p.phi(c)) / 2e-6;
      }
      const Vec g = p.grad(x);
      CHECK((g - gfd).cwiseAbs().maxCoeff() <=
            1e-5 * std::max(1.0, g.cwiseAbs().maxCoeff()));
    }
  }
}

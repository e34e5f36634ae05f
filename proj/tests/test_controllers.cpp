#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <random>
#include <sstream>

#include "slideopt/benchmarks.hpp"
#include "slideopt/controllers.hpp"

using namespace slideopt;

namespace {

Problem scalar_quadratic(double w) {
  Problem p;
  p.name = "scalar";
  p.dim_x = 1;
  p.dim_h = 1;
  p.objective = [w](const Vec& x) { return 0.5 * w * x(0) * x(0); };
  p.gradient = [w](const Vec& x) { return Vec(w * x); };
  p.constraints = [](const Vec& x) { return x; };
  p.jacobian = [](const Vec&) { return Mat(Mat::Identity(1, 1)); };
  p.linear_constraints = true;
  return p;
}

Problem flat_identity() {
  Problem p;
  p.name = "flat";
  p.dim_x = 1;
  p.dim_h = 1;
  p.objective = [](const Vec&) { return 0.0; };
  p.gradient = [](const Vec&) { return Vec(Vec::Zero(1)); };
  p.constraints = [](const Vec& x) { return x; };
  p.jacobian = [](const Vec&) { return Mat(Mat::Identity(1, 1)); };
  p.linear_constraints = true;
  return p;
}

Vec random_vec(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

Vec plant_xdot(const Problem& p, const Vec& x, const Vec& lam,
               const NtsmConfig& cfg) {
  return -normalized_gradient(p, x, cfg) - p.jac(x).transpose() * lam;
}

}  // namespace

TEST_CASE("equivalent multiplier") {
  const Problem p = scalar_quadratic(3.0);
  const auto gains = SmcGains::uniform(1, 1.0);
  CHECK(smc_equivalent(p, Vec::Constant(1, 2.0), gains)(0) ==
        doctest::Approx(-6.0));
  CHECK(smc_equivalent(p, Vec::Zero(1), gains)(0) == 0.0);

  const BenchmarkCase qp = nonconvex_qp();
  // grad = (1, -1), J = [0 2] -> -(4)^-1 (-2) = 0.5.
  CHECK(smc_equivalent(qp.problem, Eigen::Vector2d(1, 1),
                       SmcGains::uniform(1, 20.0))(0) ==
        doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("sliding-mode multiplier hand example") {
  const Problem p = scalar_quadratic(1.0);
  auto gains = SmcGains::uniform(1, 1.0);
  gains.gram_reg = 0.0;
  const Vec x = Vec::Constant(1, 2.0);
  const Vec lam = smc_lambda(p, x, gains);
  CHECK(lam(0) == doctest::Approx(-1.0));
  const double xdot = -p.grad(x)(0) - lam(0);
  CHECK(xdot == doctest::Approx(-1.0));
}

TEST_CASE("on the manifold the law reduces to the equivalent multiplier") {
  const Problem p = scalar_quadratic(2.0);
  const auto gains = SmcGains::uniform(1, 5.0);
  CHECK(smc_lambda(p, Vec::Zero(1), gains)(0) ==
        doctest::Approx(smc_equivalent(p, Vec::Zero(1), gains)(0)));
}

TEST_CASE("saturation outside the boundary layer equals sign switching") {
  const BenchmarkCase oc = obstacle_course();
  const Vec x = Eigen::Vector2d(1.0, 0.5);
  const Vec h = oc.problem.h(x);
  const double eps = 0.5 * h.cwiseAbs().minCoeff();
  const auto sign_gains = SmcGains::uniform(2, 20.0);
  const auto sat_gains =
      SmcGains::uniform(2, 20.0, Switching::Saturation, eps);
  CHECK((smc_lambda(oc.problem, x, sign_gains) -
         smc_lambda(oc.problem, x, sat_gains))
            .norm() < 1e-12);
}

TEST_CASE("closed loop splits into projected gradient and reaching term") {
  std::mt19937_64 rng(17);
  const BenchmarkCase oc = obstacle_course();
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x = random_vec(rng, 2, 2.0) + Eigen::Vector2d(3.0, 0.0);
    SmcGains gains = SmcGains::uniform(2, 7.0);
    gains.gram_reg = 0.0;
    const Mat J = oc.problem.jac(x);
    const Vec g = oc.problem.grad(x);
    const Vec xdot = -g - J.transpose() * smc_lambda(oc.problem, x, gains);
    const Mat G = J * J.transpose();
    const Mat P = Mat::Identity(2, 2) - J.transpose() * G.inverse() * J;
    const Vec expected =
        -P * g - J.transpose() * G.inverse() *
                     (gains.K.cwiseProduct(sign(oc.problem.h(x))));
    CHECK((xdot - expected).norm() < 1e-9 * std::max(1.0, xdot.norm()));
    // Reaching law: J x' = -K sgn h.
    CHECK((J * xdot + gains.K.cwiseProduct(sign(oc.problem.h(x)))).norm() <
          1e-9 * std::max(1.0, xdot.norm()));
  }
}

TEST_CASE("sliding-mode gains validation") {
  SmcGains g = SmcGains::uniform(2, 1.0);
  g.K(1) = 0.0;
  CHECK_THROWS(g.validate());
  CHECK_THROWS(SmcGains::uniform(1, 1.0, Switching::Saturation, 0.0).validate());
}

TEST_CASE("super-twisting step") {
  const StaGains g(2.0, 1.0);
  const auto origin = sta_step(Vec::Zero(1), Vec::Zero(1), g);
  CHECK(origin.u(0) == 0.0);
  CHECK(origin.z_dot(0) == 0.0);

  const auto a = sta_step(Vec::Constant(1, 1.0), Vec::Zero(1), g);
  CHECK(a.u(0) == doctest::Approx(-2.0));
  CHECK(a.z_dot(0) == doctest::Approx(-1.0));

  const auto b =
      sta_step(Vec::Constant(1, -4.0), Vec::Constant(1, 0.5), StaGains(1.5, 1.0));
  CHECK(b.u(0) == doctest::Approx(3.5));
  CHECK(b.z_dot(0) == doctest::Approx(1.0));
}

TEST_CASE("super-twisting gain condition") {
  CHECK(StaGains(10.0, 20.0).meets_sufficient_condition());
  CHECK_FALSE(StaGains::practical(4.0).meets_sufficient_condition());
  CHECK(StaGains::practical(4.0).K1 == doctest::Approx(3.0));
}

TEST_CASE("super-twisting multiplier realizes h' = u") {
  const BenchmarkCase oc = obstacle_course();
  const Vec x = Eigen::Vector2d(2.0, 0.3);
  const Vec u = Eigen::Vector2d(0.7, -1.1);
  const Vec lam = sta_lambda(oc.problem, x, u, 0.0);
  const Mat J = oc.problem.jac(x);
  const Vec hdot = J * (-oc.problem.grad(x) - J.transpose() * lam);
  CHECK((hdot - u).norm() < 1e-10);
}

TEST_CASE("terminal sliding variable") {
  NtsmConfig cfg = NtsmConfig::uniform(1, 1.0, 1.0);
  cfg.beta = 2.0;
  cfg.gamma = 1.5;
  CHECK(ntsm_sliding_variable(Vec::Zero(1), Vec::Zero(1), cfg)(0) == 0.0);
  CHECK(ntsm_sliding_variable(Vec::Ones(1), Vec::Zero(1), cfg)(0) == 1.0);
  CHECK(ntsm_sliding_variable(Vec::Zero(1), Vec::Ones(1), cfg)(0) ==
        doctest::Approx(0.5));
  CHECK(ntsm_sliding_variable(Vec::Zero(1), -Vec::Ones(1), cfg)(0) ==
        doctest::Approx(-0.5));
}

TEST_CASE("normalized gradient") {
  NtsmConfig cfg = NtsmConfig::uniform(1, 1.0, 1.0);
  cfg.p = 0.5;
  const Vec out = normalized_gradient(Vec(Eigen::Vector2d(3, 4)), cfg);
  CHECK(out(0) == doctest::Approx(3.0 / std::sqrt(5.0)));
  CHECK(out(1) == doctest::Approx(4.0 / std::sqrt(5.0)));
  CHECK(normalized_gradient(Vec(Vec::Zero(2)), cfg).norm() == 0.0);
  const Vec unit = Eigen::Vector2d(0.6, 0.8);
  cfg.p = 0.9;
  CHECK((normalized_gradient(unit, cfg) - unit).norm() < 1e-15);
}

TEST_CASE("dual-rate input, scalar hand example") {
  const Problem p = flat_identity();
  NtsmConfig cfg = NtsmConfig::uniform(1, 1.0, 1.0);
  cfg.beta = 2.0;
  cfg.gamma = 1.5;
  cfg.rho = 0.5;
  cfg.eta = 0.0;
  const auto out =
      ntsm_control(p, Vec::Zero(1), Vec::Zero(1), Vec::Ones(1), cfg);
  CHECK(out.sliding(0) == doctest::Approx(0.5));
  CHECK(out.u(0) ==
        doctest::Approx((4.0 / 3.0) * (0.5 + std::sqrt(0.5) + 1.0)));
  CHECK(out.u(0) == doctest::Approx(2.9428).epsilon(1e-4));

  const auto rest =
      ntsm_control(p, Vec::Zero(1), Vec::Zero(1), Vec::Zero(1), cfg);
  CHECK(rest.u(0) == 0.0);
}

TEST_CASE("dual-rate input scales inversely with the Gram matrix") {
  const double c = 4.0;
  Problem p = flat_identity();
  p.constraints = [c](const Vec& x) { return Vec(std::sqrt(c) * x); };
  p.jacobian = [c](const Vec&) {
    return Mat(std::sqrt(c) * Mat::Identity(1, 1));
  };
  NtsmConfig cfg = NtsmConfig::uniform(1, 1.0, 1.0);
  cfg.eta = 0.0;
  // Same z2 = J x' = 1 as the unit case.
  const Vec xdot = Vec::Constant(1, 1.0 / std::sqrt(c));
  const double u_c = ntsm_control(p, Vec::Zero(1), Vec::Zero(1), xdot, cfg).u(0);
  const double u_1 = ntsm_control(flat_identity(), Vec::Zero(1), Vec::Zero(1),
                                  Vec::Ones(1), cfg)
                         .u(0);
  CHECK(u_c == doctest::Approx(u_1 / c));
}

TEST_CASE("drift vanishes for a resting plant with linear constraints") {
  const BenchmarkCase b = consensus_estimation(3, 2);
  const auto& p = b.problem;
  const NtsmConfig cfg = consensus_ntsm_config(p.dim_h);
  const Vec x = Vec::Ones(p.dim_x);
  CHECK(ntsm_drift(p, x, Vec::Zero(p.dim_h), Vec::Zero(p.dim_x), cfg).norm() ==
        0.0);
}

TEST_CASE("drift reduces to -J J_fp x' for linear constraints") {
  Problem p;
  p.name = "lin";
  p.dim_x = 3;
  p.dim_h = 1;
  p.objective = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  p.gradient = [](const Vec& x) { return x; };
  p.hessian_phi = [](const Vec&) { return Mat(Mat::Identity(3, 3)); };
  p.constraints = [](const Vec& x) { return Vec::Constant(1, x.sum()); };
  p.jacobian = [](const Vec&) { return Mat(Mat::Ones(1, 3)); };
  p.linear_constraints = true;
  NtsmConfig cfg = NtsmConfig::uniform(1, 1.0, 1.0);
  cfg.p = 0.0;
  const Vec x = Eigen::Vector3d(0.2, -0.4, 1.0);
  const Vec xdot = Eigen::Vector3d(1.0, 2.0, -0.5);
  CHECK(ntsm_drift(p, x, Vec::Zero(1), xdot, cfg)(0) ==
        doctest::Approx(-xdot.sum()));
}

TEST_CASE("drift equals the second derivative of h along the frozen plant") {
  // Oracle: central difference of h' = J(x) x'(x) along x' with the
  // multiplier held fixed.
  std::mt19937_64 rng(23);
  std::vector<BenchmarkCase> cases;
  cases.push_back(consensus_estimation(3, 2));
  cases.push_back(obstacle_course());
  for (const auto& b : cases) {
    CAPTURE(b.name);
    const auto& p = b.problem;
    NtsmConfig cfg = NtsmConfig::uniform(p.dim_h, 1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const Vec x = random_vec(rng, p.dim_x) + Vec::Constant(p.dim_x, 1.5);
      const Vec lam = random_vec(rng, p.dim_h);
      const Vec v = plant_xdot(p, x, lam, cfg);
      auto hdot = [&](const Vec& y) {
        return Vec(p.jac(y) * plant_xdot(p, y, lam, cfg));
      };
      const double e = 1e-5;
      const Vec oracle = (hdot(x + e * v) - hdot(x - e * v)) / (2 * e);
      const Vec a = ntsm_drift(p, x, lam, v, cfg);
      CHECK((a - oracle).norm() <= 1e-5 * std::max(1.0, oracle.norm()));
    }
  }
}

TEST_CASE("dual-rate input enforces the reaching law on S") {
  // Oracle: S' by central difference along (x', lambda') = (plant, u).
  std::mt19937_64 rng(29);
  std::vector<BenchmarkCase> cases;
  cases.push_back(consensus_estimation(3, 2));
  cases.push_back(obstacle_course());
  for (const auto& b : cases) {
    CAPTURE(b.name);
    const auto& p = b.problem;
    NtsmConfig cfg = NtsmConfig::uniform(p.dim_h, 2.0, 1.5);
    cfg.eta = 0.3;
    for (int trial = 0; trial < 10; ++trial) {
      const Vec x = random_vec(rng, p.dim_x) + Vec::Constant(p.dim_x, 1.5);
      const Vec lam = random_vec(rng, p.dim_h);
      const Vec v = plant_xdot(p, x, lam, cfg);
      const auto out = ntsm_control(p, x, lam, v, cfg);
      if (out.z2.cwiseAbs().minCoeff() < 1e-2) continue;
      auto S = [&](const Vec& y, const Vec& l) {
        return ntsm_sliding_variable(p.h(y),
                                     Vec(p.jac(y) * plant_xdot(p, y, l, cfg)),
                                     cfg);
      };
      const double e = 1e-6;
      const Vec sdot =
          (S(x + e * v, lam + e * out.u) - S(x - e * v, lam - e * out.u)) /
          (2 * e);
      const Vec s = out.sliding;
      const Vec expected =
          -cfg.K1.cwiseProduct(s) -
          cfg.K2.cwiseProduct(Vec(signed_pow(s, cfg.rho))) -
          (cfg.gamma / cfg.beta) * cfg.eta *
              out.z2.array().abs().pow(cfg.gamma - 1.0).matrix().cwiseProduct(
                  Vec(sign(s)));
      CHECK((sdot - expected).norm() <=
            1e-4 * std::max(1.0, expected.norm()));
    }
  }
}

TEST_CASE("terminal sliding configuration validation") {
  NtsmConfig cfg = NtsmConfig::uniform(2, 1.0, 1.0);
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma = 2.5;
  CHECK_THROWS(cfg.validate());
  cfg.gamma = 1.5;
  cfg.rho = 1.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("primal-dual gradient rates") {
  const Problem p = scalar_quadratic(1.0);
  const auto r = pdgd_rhs(p, Vec::Ones(1), Vec::Zero(1), PdgdGains{});
  CHECK(r.xdot(0) == doctest::Approx(-1.0));
  CHECK(r.lamdot(0) == doctest::Approx(1.0));
  const auto k = pdgd_rhs(p, Vec::Zero(1), Vec::Zero(1), PdgdGains{});
  CHECK(k.xdot.norm() == 0.0);
  CHECK(k.lamdot.norm() == 0.0);
}

TEST_CASE("proportional-integral multiplier") {
  CHECK(pi_cmo_lambda(Vec::Zero(1), Vec::Zero(1), PiCmoGains{}).norm() == 0.0);
  CHECK(pi_cmo_lambda(Vec::Ones(1), Vec::Constant(1, 2.0), PiCmoGains{3.0, 0.5})(
            0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(pi_cmo_lambda(Vec::Ones(1), Vec::Ones(2), PiCmoGains{}),
                  DimensionError);
}

TEST_CASE("projected gradient flow is tangent to the constraints") {
  std::mt19937_64 rng(31);
  const BenchmarkCase oc = obstacle_course();
  const BenchmarkCase cs = consensus_estimation(4, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = random_vec(rng, cs.problem.dim_x);
    CHECK((cs.problem.jac(x) * pgf_rhs(cs.problem, x, 0.0)).norm() < 1e-9);
  }
  // grad phi in range(J^T) gives a rest point.
  Problem p = scalar_quadratic(1.0);
  CHECK(pgf_rhs(p, Vec::Constant(1, 3.0), 0.0).norm() < 1e-14);
  (void)oc;
}

TEST_CASE("potential field") {
  ApfGains g;
  const Vec goal = Eigen::Vector2d(6.0, 0.0);
  CHECK(apf_control(goal, goal, {}, g).norm() == 0.0);

  const std::vector<Obstacle> far{{Eigen::Vector2d(100.0, 0.0), 1.0}};
  const Vec q = Eigen::Vector2d(1.0, 2.0);
  CHECK((apf_control(q, goal, far, g) - (goal - q)).norm() < 1e-14);

  // Mirror-symmetric obstacles cancel transversally on the axis.
  const std::vector<Obstacle> pair{{Eigen::Vector2d(3.0, 1.0), 0.8},
                                   {Eigen::Vector2d(3.0, -1.0), 0.8}};
  const Vec u = apf_control(Eigen::Vector2d(2.0, 0.0), goal, pair, g);
  CHECK(std::abs(u(1)) < 1e-12);

  CHECK_THROWS_AS(apf_control(Eigen::Vector2d(3.0, 1.0), goal, pair, g),
                  std::domain_error);
}

TEST_CASE("controller names") {
  CHECK(controller_name(SmcGains::uniform(1, 1.0)) == "smc");
  CHECK(controller_name(StaGains(10.0, 20.0)) == "sta");
  CHECK(controller_name(PdgdGains{}) == "pdgd");
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "slideopt/benchmarks.hpp"
#include "slideopt/engine.hpp"

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

Problem random_linear_problem(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> d(0.0, 1.0);
  Mat A(n, n), C(m, n);
  Vec c(n), b(m);
  for (int i = 0; i < n; ++i) {
    c(i) = d(rng);
    for (int j = 0; j < n; ++j) A(i, j) = d(rng);
  }
  for (int i = 0; i < m; ++i) {
    b(i) = d(rng);
    for (int j = 0; j < n; ++j) C(i, j) = d(rng);
  }
  const Mat Q = A * A.transpose() / n + Mat::Identity(n, n);
  Problem p;
  p.name = "random";
  p.dim_x = n;
  p.dim_h = m;
  p.objective = [Q, c](const Vec& x) { return 0.5 * x.dot(Q * x) + c.dot(x); };
  p.gradient = [Q, c](const Vec& x) { return Vec(Q * x + c); };
  p.hessian_phi = [Q](const Vec&) { return Q; };
  p.constraints = [C, b](const Vec& x) { return Vec(C * x - b); };
  p.jacobian = [C](const Vec&) { return C; };
  p.linear_constraints = true;
  return p;
}

IntegratorConfig euler(double dt, double t_final) {
  IntegratorConfig c;
  c.dt = dt;
  c.t_final = t_final;
  return c;
}

}  // namespace

TEST_CASE("integrator configuration validation") {
  IntegratorConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS(c.validate());
  c.dt = 1e-3;
  c.t_final = -1.0;
  CHECK_THROWS(c.validate());
  c.t_final = 1.0;
  c.record_stride = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("ideal sliding mode on the scalar example follows x = 1 - t") {
  const Problem p = scalar_quadratic(1.0);
  const auto traj = simulate(p, SmcGains::uniform(1, 1.0), {}, Vec::Ones(1),
                             Vec::Zero(1), euler(1e-4, 1.5));
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    if (t < 1.0 - 5e-5) {
      CHECK(std::abs(traj.states[k](0) - (1.0 - t)) < 1e-8);
    } else {
      CHECK(std::abs(traj.states[k](0)) <= 1e-4 + 1e-8);
    }
  }
  const auto tr = reaching_time(traj, 1e-3);
  REQUIRE(tr.has_value());
  CHECK(*tr == doctest::Approx(0.999).epsilon(2e-4 / 0.999));
}

TEST_CASE("trajectory invariants") {
  const BenchmarkCase oc = obstacle_course();
  IntegratorConfig c = euler(1e-3, 0.5);
  c.record_stride = 7;
  const auto traj = simulate(oc.problem, oc.default_controller, oc.disturbance,
                             oc.x0(), oc.lambda0, c);
  REQUIRE(traj.size() > 2);
  CHECK(traj.states.size() == traj.size());
  CHECK(traj.multipliers.size() == traj.size());
  CHECK(traj.violations.size() == traj.size());
  CHECK(traj.sliding.size() == traj.size());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    CHECK(traj.times[k] > traj.times[k - 1]);
  }
  CHECK(traj.t_end() == doctest::Approx(0.5));
}

TEST_CASE("feasible stationary start stays put") {
  const Problem p = scalar_quadratic(2.0);
  for (const ControllerConfig& ctl :
       {ControllerConfig{SmcGains::uniform(1, 3.0)},
        ControllerConfig{PdgdGains{}}, ControllerConfig{PiCmoGains{}},
        ControllerConfig{PgfConfig{}}, ControllerConfig{StaGains(10, 20)}}) {
    CAPTURE(controller_name(ctl));
    const auto traj =
        simulate(p, ctl, {}, Vec::Zero(1), Vec::Zero(1), euler(1e-3, 0.2));
    for (const auto& x : traj.states) CHECK(x(0) == 0.0);
    CHECK(*reaching_time(traj, 1e-6) == 0.0);
    CHECK(chattering_amplitude(traj, 0.0) == 0.0);
  }
}

TEST_CASE("sign switching refuses the fourth-order integrator") {
  IntegratorConfig c = euler(1e-3, 0.1);
  c.method = Method::Rk4;
  CHECK_THROWS_AS(simulate(scalar_quadratic(1.0), SmcGains::uniform(1, 1.0),
                           {}, Vec::Ones(1), Vec::Zero(1), c),
                  std::invalid_argument);
  CHECK_NOTHROW(simulate(scalar_quadratic(1.0),
                         SmcGains::uniform(1, 1.0, Switching::Saturation, 0.01),
                         {}, Vec::Ones(1), Vec::Zero(1), c));
}

TEST_CASE("divergent primal-dual run is truncated and never reaches") {
  const Problem p = scalar_quadratic(-10.0);
  const auto traj = simulate(p, PdgdGains{}, {}, Vec::Ones(1), Vec::Zero(1),
                             euler(1e-3, 5.0));
  CHECK(traj.diverged);
  REQUIRE(traj.divergence_time.has_value());
  CHECK(*traj.divergence_time < 5.0);
  CHECK_FALSE(reaching_time(traj, 1e-3).has_value());
}

TEST_CASE("reaching time needs the full dwell window") {
  Trajectory t;
  for (int k = 0; k <= 10; ++k) {
    t.times.push_back(0.01 * k);
    t.violations.push_back(Vec::Constant(1, k < 8 ? 1.0 : 0.0));
  }
  CHECK_FALSE(reaching_time(t, 1e-3, 0.05).has_value());
  CHECK(*reaching_time(t, 1e-3, 0.02) == doctest::Approx(0.08));
  t.violations[9](0) = 1.0;
  CHECK_FALSE(reaching_time(t, 1e-3, 0.01).has_value());
}

TEST_CASE("bound calculators") {
  CHECK(smc_reach_bound(Vec::Zero(1), SmcGains::uniform(1, 1.0)) == 0.0);
  CHECK(smc_reach_bound(Vec::Ones(1), SmcGains::uniform(1, 1.0)) ==
        doctest::Approx(std::sqrt(2.0)));

  Mat J(1, 2);
  J << 0.0, 2.0;
  const auto g20 = SmcGains::uniform(1, 20.0);
  CHECK(*matched_reach_bound(Vec::Constant(1, 2.0), g20, J, 1.0) ==
        doctest::Approx(0.125));
  CHECK(*matched_reach_bound(Vec::Constant(1, 2.0), g20, J, 0.0) ==
        doctest::Approx(0.1));
  CHECK_FALSE(matched_reach_bound(Vec::Constant(1, 2.0),
                                  SmcGains::uniform(1, 4.0), J, 1.0)
                  .has_value());

  CHECK(noise_ultimate_bound(g20, J, 0.0, 0.0) == 0.0);
  CHECK(noise_ultimate_bound(g20, J, 0.0, 0.1) == doctest::Approx(0.1));
  CHECK(noise_ultimate_bound(g20, J, 0.5, 0.05) == doctest::Approx(0.15));
}

TEST_CASE("terminal sliding time bounds") {
  NtsmConfig cfg = NtsmConfig::uniform(1, 2.0, 1.0);
  cfg.beta = 2.0;
  cfg.gamma = 1.5;
  const auto zero = ntsm_time_bounds(Vec::Zero(1), Vec::Zero(1), 0.0, cfg, 0, 0);
  CHECK(zero.T1 == 0.0);
  CHECK(zero.T2 == 0.0);
  CHECK_FALSE(zero.T3.has_value());

  const auto b = ntsm_time_bounds(Vec::Zero(1), Vec::Ones(1), 0.0, cfg, 0, 0);
  CHECK(b.T2 == doctest::Approx(3.0 * std::pow(2.0, -2.0 / 3.0)));
  CHECK(b.T2 == doctest::Approx(1.8899).epsilon(1e-4));

  cfg.rho = 0.5;
  const auto c = ntsm_time_bounds(Vec::Constant(1, 4.0), Vec::Zero(1), 1.0,
                                  cfg, 1.0, 1.0);
  // (2/K1) ln(1 + K1 |S0|^(1-rho) / (K2 (1-rho))) with K1 = 2, K2 = 1.
  CHECK(c.T1 == doctest::Approx(std::log(1.0 + 2.0 * 2.0 / 0.5)));
  REQUIRE(c.T3.has_value());
  CHECK(*c.T3 > 0.0);
}

TEST_CASE("gain tuning") {
  const auto g = tune_gains(1, 4.0, 0.5, 0.01, 1e-3);
  CHECK(g.k_min() == doctest::Approx(4.0));
  CHECK(g.eps == doctest::Approx(0.014));
  CHECK(g.switching == Switching::Saturation);
  const auto f = tune_gains(2, 4.0, 0.0, 0.0, 1e-3);
  CHECK(f.k_min() == doctest::Approx(1e-3));
  CHECK(f.eps == doctest::Approx(1e-6));
  CHECK(f.K.size() == 2);
}

TEST_CASE("reaching times stay under the nominal bound") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> k(1.0, 5.0);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 2 + trial % 4;
    const int m = 1 + trial % (n - 1);
    const Problem p = random_linear_problem(rng, n, m);
    const auto gains = SmcGains::uniform(m, k(rng));
    const Vec x0 = Vec::Zero(n);
    const double bound = smc_reach_bound(p.h(x0), gains);
    const auto traj =
        simulate(p, gains, {}, x0, Vec::Zero(m), euler(1e-4, bound + 0.2));
    const auto tr = reaching_time(traj, 1e-3);
    REQUIRE(tr.has_value());
    CHECK(*tr <= bound);
  }
}

TEST_CASE("sliding-phase violation is of order dt K") {
  const BenchmarkCase b = example1(1.0, 1.0, 1.0000123);
  for (double dt : {2e-4, 1e-4, 5e-5}) {
    const auto traj = simulate(b.problem, b.default_controller, {}, b.x0(),
                               b.lambda0, euler(dt, 1.5));
    CHECK(chattering_amplitude(traj, 1.1) <= dt * 1.0 + 1e-12);
  }
}

TEST_CASE("chattering amplitude halves with the step") {
  const BenchmarkCase b = example1(1.0, 1.0, 1.0000123);
  auto amp = [&](double dt) {
    const auto traj = simulate(b.problem, b.default_controller, {}, b.x0(),
                               b.lambda0, euler(dt, 1.5));
    return chattering_amplitude(traj, 1.1);
  };
  const double a1 = amp(1e-4);
  const double a2 = amp(5e-5);
  CHECK(a2 / a1 >= 0.3);
  CHECK(a2 / a1 <= 0.7);
}

TEST_CASE("projected gradient flow decreases the objective on the manifold") {
  const BenchmarkCase cs = consensus_estimation(4, 2);
  Vec x0(cs.problem.dim_x);
  for (int i = 0; i < 4; ++i) x0.segment(2 * i, 2) = Eigen::Vector2d(1.0, -2.0);
  const auto traj = simulate(cs.problem, PgfConfig{0.0}, {}, x0,
                             Vec::Zero(cs.problem.dim_h), euler(1e-3, 2.0));
  double prev = cs.problem.phi(traj.states.front());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double cur = cs.problem.phi(traj.states[k]);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
    CHECK(traj.violations[k].cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("simulation is deterministic") {
  const BenchmarkCase qp = nonconvex_qp();
  const auto icfg = euler(1e-4, 0.5);
  const auto a = simulate(qp.problem, qp.default_controller, qp.disturbance,
                          qp.x0(), qp.lambda0, icfg);
  const auto b = simulate(qp.problem, qp.default_controller, qp.disturbance,
                          qp.x0(), qp.lambda0, icfg);
  std::ostringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("csv layout") {
  const BenchmarkCase qp = nonconvex_qp();
  IntegratorConfig c = euler(1e-3, 0.01);
  const auto traj = simulate(qp.problem, qp.default_controller, qp.disturbance,
                             qp.x0(), qp.lambda0, c);
  std::ostringstream os;
  write_csv(traj, os);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x_1,x_2,lambda_1,h_1,S_1");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == static_cast<int>(traj.size()));
}

TEST_CASE("summary metrics") {
  const BenchmarkCase b = example1();
  const auto traj = simulate(b.problem, b.default_controller, {}, b.x0(),
                             b.lambda0, b.integrator);
  const auto r = summarize(traj, std::sqrt(2.0), 1e-3, kDefaultDwell,
                           b.optimum->x_star);
  REQUIRE(r.reaching_time_empirical.has_value());
  CHECK(r.bound_satisfied);
  CHECK(r.max_violation_after_reach <= 1e-3);
  CHECK(*r.final_distance_to_optimum <= 1e-3);
  CHECK_FALSE(r.diverged);
}

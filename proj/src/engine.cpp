#include "slideopt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace slideopt {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !(t_final > 0.0)) {
    throw std::invalid_argument("IntegratorConfig: dt and t_final must be > 0");
  }
  if (dt > t_final) {
    throw std::invalid_argument("IntegratorConfig: dt exceeds t_final");
  }
  if (record_stride < 1) {
    throw std::invalid_argument("IntegratorConfig: record_stride must be >= 1");
  }
}

double Trajectory::max_violation_after(double t_start) const {
  double out = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    if (times[k] >= t_start) {
      out = std::max(out, violations[k].lpNorm<Eigen::Infinity>());
    }
  }
  return out;
}

double Trajectory::max_sliding_norm_after(double t_start) const {
  double out = 0.0;
  for (std::size_t k = 0; k < size(); ++k) {
    if (times[k] >= t_start) out = std::max(out, sliding[k].norm());
  }
  return out;
}

namespace {

struct Sample {
  Vec lambda;
  Vec h;
  Vec sliding;
  Vec aux;
};

// Stacked closed loop y = [x; internal state].
struct ClosedLoop {
  int n = 0;
  int internal = 0;
  std::function<Vec(double, const Vec&)> rhs;
  std::function<Sample(double, const Vec&)> observe;
};

// Everything the plant needs besides the multiplier.
class Plant {
 public:
  Plant(const Problem& problem, const DisturbanceSpec& d)
      : problem_(problem), d_(d) {}

  // Matrix that multiplies lambda in the primal dynamics.
  Mat actuation(double t, const Vec& x, const Mat& j) const {
    if (!d_.structured) return j;
    return perturbed_jacobian(problem_, d_, t, x);
  }

  Vec xi(double t, const Vec& x) const {
    Vec out = Vec::Zero(problem_.dim_x);
    if (d_.matched) out += apply_matched(problem_, d_, t, x);
    if (d_.additive) {
      const Vec a = d_.additive->xi(t);
      if (a.norm() > d_.additive->bound * (1.0 + 1e-12) + 1e-12) {
        throw DisturbanceError("additive disturbance exceeds its bound");
      }
      out += a;
    }
    return out;
  }

  Vec measure(double t, const Vec& s) const {
    return d_.noise ? noisy_sliding_measurement(s, d_, t) : s;
  }

 private:
  const Problem& problem_;
  const DisturbanceSpec& d_;
};

ClosedLoop build(const Problem& problem, const ControllerConfig& controller,
                 const DisturbanceSpec& d, const Plant& plant) {
  const int n = problem.dim_x;
  const int m = problem.dim_h;

  struct Visitor {
    const Problem* problem;
    const DisturbanceSpec* d;
    const Plant* plant;
    int n;
    int m;

    ClosedLoop operator()(const SmcGains& g) const {
      g.validate();
      if (g.K.size() != m) throw DimensionError("SMC gain dimension mismatch");
      ClosedLoop cl{n, 0, {}, {}};
      auto lambda_at = [problem = problem, plant = plant, n = n, m = m, g](double t, const Vec& x) {
        return smc_lambda(*problem, x, g, plant->measure(t, problem->h(x)));
      };
      cl.rhs = [problem = problem, plant = plant, n = n, m = m, lambda_at](double t, const Vec& y) -> Vec {
        const Mat j = problem->jac(y);
        const Vec lam = lambda_at(t, y);
        return Vec(-problem->grad(y) -
                   plant->actuation(t, y, j).transpose() * lam + plant->xi(t, y));
      };
      cl.observe = [problem = problem, plant = plant, n = n, m = m, lambda_at](double t, const Vec& y) {
        const Vec h = problem->h(y);
        return Sample{lambda_at(t, y), h, h, Vec()};
      };
      return cl;
    }

    ClosedLoop operator()(const StaGains& g) const {
      ClosedLoop cl{n, m, {}, {}};
      auto law = [problem = problem, plant = plant, n = n, m = m, g](double t, const Vec& y) {
        const Vec x = y.head(n);
        const StaOutput out =
            sta_step(plant->measure(t, problem->h(x)), y.tail(m), g);
        return std::make_pair(sta_lambda(*problem, x, out.u, g.gram_reg),
                              out.z_dot);
      };
      cl.rhs = [problem = problem, plant = plant, n = n, m = m, law](double t, const Vec& y) -> Vec {
        const Vec x = y.head(n);
        const auto [lam, zdot] = law(t, y);
        Vec dy(n + m);
        dy.head(n) = -problem->grad(x) -
                     plant->actuation(t, x, problem->jac(x)).transpose() * lam +
                     plant->xi(t, x);
        dy.tail(m) = zdot;
        return dy;
      };
      cl.observe = [problem = problem, plant = plant, n = n, m = m, law](double t, const Vec& y) {
        const Vec h = problem->h(y.head(n));
        return Sample{law(t, y).first, h, h, Vec(y.tail(m))};
      };
      return cl;
    }

    ClosedLoop operator()(const NtsmConfig& c) const {
      c.validate();
      if (c.K1.size() != m) throw DimensionError("NTSM gain dimension mismatch");
      if (d->noise) {
        throw DisturbanceError(
            "measurement noise is not supported by the dual-rate law");
      }
      ClosedLoop cl{n, m, {}, {}};
      auto velocity = [problem = problem, plant = plant, n = n, m = m, c](double t, const Vec& x, const Vec& lam) {
        return Vec(-normalized_gradient(*problem, x, c) -
                   plant->actuation(t, x, problem->jac(x)).transpose() * lam +
                   plant->xi(t, x));
      };
      cl.rhs = [problem = problem, plant = plant, n = n, m = m, c, velocity](double t, const Vec& y) -> Vec {
        const Vec x = y.head(n);
        const Vec lam = y.tail(m);
        Vec dy(n + m);
        dy.head(n) = velocity(t, x, lam);
        dy.tail(m) = ntsm_control(*problem, x, lam, dy.head(n), c).u;
        return dy;
      };
      cl.observe = [problem = problem, plant = plant, n = n, m = m, c, velocity](double t, const Vec& y) {
        const Vec x = y.head(n);
        const Vec lam = y.tail(m);
        const NtsmOutput out =
            ntsm_control(*problem, x, lam, velocity(t, x, lam), c);
        return Sample{lam, problem->h(x), out.sliding, out.z2};
      };
      return cl;
    }

    ClosedLoop operator()(const PdgdGains& g) const {
      ClosedLoop cl{n, m, {}, {}};
      cl.rhs = [problem = problem, plant = plant, n = n, m = m, g](double t, const Vec& y) -> Vec {
        const Vec x = y.head(n);
        const Vec lam = y.tail(m);
        const Mat j = problem->jac(x);
        Vec dy(n + m);
        dy.head(n) = -g.primal * (problem->grad(x) +
                                  plant->actuation(t, x, j).transpose() * lam) +
                     plant->xi(t, x);
        dy.tail(m) = g.dual * plant->measure(t, problem->h(x));
        return dy;
      };
      cl.observe = [problem = problem, plant = plant, n = n, m = m](double, const Vec& y) {
        const Vec h = problem->h(y.head(n));
        return Sample{Vec(y.tail(m)), h, h, Vec()};
      };
      return cl;
    }

    ClosedLoop operator()(const PiCmoGains& g) const {
      ClosedLoop cl{n, m, {}, {}};
      auto law = [problem = problem, plant = plant, n = n, m = m, g](double t, const Vec& y) {
        const Vec h = plant->measure(t, problem->h(y.head(n)));
        return std::make_pair(pi_cmo_lambda(h, y.tail(m), g), h);
      };
      cl.rhs = [problem = problem, plant = plant, n = n, m = m, law](double t, const Vec& y) -> Vec {
        const Vec x = y.head(n);
        const auto [lam, h] = law(t, y);
        Vec dy(n + m);
        dy.head(n) = -problem->grad(x) -
                     plant->actuation(t, x, problem->jac(x)).transpose() * lam +
                     plant->xi(t, x);
        dy.tail(m) = h;
        return dy;
      };
      cl.observe = [problem = problem, plant = plant, n = n, m = m, law](double t, const Vec& y) {
        const Vec h = problem->h(y.head(n));
        return Sample{law(t, y).first, h, h, Vec(y.tail(m))};
      };
      return cl;
    }

    ClosedLoop operator()(const PgfConfig& c) const {
      ClosedLoop cl{n, 0, {}, {}};
      cl.rhs = [problem = problem, plant = plant, n = n, m = m, c](double t, const Vec& y) -> Vec {
        return Vec(pgf_rhs(*problem, y, c.gram_reg) + plant->xi(t, y));
      };
      cl.observe = [problem = problem, plant = plant, n = n, m = m, c](double, const Vec& y) {
        const Vec h = problem->h(y);
        return Sample{multiplier_estimate(*problem, y, c.gram_reg), h, h,
                      Vec()};
      };
      return cl;
    }

    ClosedLoop operator()(const ApfConfig& c) const {
      if (c.goal.size() != n) throw DimensionError("APF goal dimension");
      ClosedLoop cl{n, 0, {}, {}};
      cl.rhs = [c](double, const Vec& y) -> Vec {
        return apf_control(y, c.goal, c.obstacles, c.gains);
      };
      cl.observe = [problem = problem, plant = plant, n = n, m = m](double, const Vec& y) {
        const Vec h = problem->h(y);
        return Sample{Vec::Zero(m), h, h, Vec()};
      };
      return cl;
    }
  };

  return std::visit(Visitor{&problem, &d, &plant, n, m}, controller);
}

bool requires_euler(const ControllerConfig& c) {
  const auto* smc = std::get_if<SmcGains>(&c);
  return smc != nullptr && smc->switching == Switching::Sign;
}

}  // namespace

Trajectory simulate(const Problem& problem, const ControllerConfig& controller,
                    const DisturbanceSpec& disturbance, const Vec& x0,
                    const Vec& lam0, const IntegratorConfig& icfg) {
  icfg.validate();
  problem.check_x(x0);
  if (requires_euler(controller) && icfg.method != Method::Euler) {
    throw std::invalid_argument(
        "simulate: ideal sign switching is discontinuous; use Euler");
  }

  const Plant plant(problem, disturbance);
  const ClosedLoop cl = build(problem, controller, disturbance, plant);

  Vec y(cl.n + cl.internal);
  y.head(cl.n) = x0;
  if (cl.internal > 0) {
    const bool carries_lambda = std::holds_alternative<NtsmConfig>(controller) ||
                                std::holds_alternative<PdgdGains>(controller);
    if (carries_lambda) {
      problem.check_lambda(lam0);
      y.tail(cl.internal) = lam0;
    } else {
      y.tail(cl.internal).setZero();
    }
  }

  Trajectory traj;
  auto record = [&](double t, const Vec& state) {
    Sample s = cl.observe(t, state);
    traj.times.push_back(t);
    traj.states.push_back(state.head(cl.n));
    traj.multipliers.push_back(std::move(s.lambda));
    traj.violations.push_back(std::move(s.h));
    traj.sliding.push_back(std::move(s.sliding));
    traj.aux.push_back(std::move(s.aux));
  };

  const double dt = icfg.dt;
  const auto steps = static_cast<long long>(std::llround(icfg.t_final / dt));
  record(0.0, y);
  for (long long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (icfg.method == Method::Euler) {
      y += dt * cl.rhs(t, y);
    } else {
      const Vec k1 = cl.rhs(t, y);
      const Vec k2 = cl.rhs(t + 0.5 * dt, y + 0.5 * dt * k1);
      const Vec k3 = cl.rhs(t + 0.5 * dt, y + 0.5 * dt * k2);
      const Vec k4 = cl.rhs(t + dt, y + dt * k3);
      y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    const double t_next = static_cast<double>(k + 1) * dt;
    if (!y.allFinite() ||
        y.head(cl.n).lpNorm<Eigen::Infinity>() > icfg.divergence_threshold) {
      traj.diverged = true;
      traj.divergence_time = t_next;
      break;
    }
    if ((k + 1) % icfg.record_stride == 0 || k + 1 == steps) {
      record(t_next, y);
    }
  }
  return traj;
}

std::optional<double> reaching_time(const Trajectory& traj, double tol,
                                    double dwell) {
  const std::size_t count = traj.size();
  if (count == 0) return std::nullopt;
  // next_bad[k]: index of the first violating sample at or after k.
  std::vector<std::size_t> next_bad(count + 1, count);
  for (std::size_t k = count; k-- > 0;) {
    const bool bad = traj.violations[k].lpNorm<Eigen::Infinity>() > tol;
    next_bad[k] = bad ? k : next_bad[k + 1];
  }
  for (std::size_t k = 0; k < count; ++k) {
    if (next_bad[k] == k) continue;
    const double window_end = traj.times[k] + dwell;
    if (window_end > traj.t_end() + 1e-12) break;
    if (next_bad[k] == count || traj.times[next_bad[k]] > window_end) {
      return traj.times[k];
    }
  }
  return std::nullopt;
}

double smc_reach_bound(const Vec& h0, const SmcGains& gains) {
  return std::sqrt(2.0) * h0.norm() / gains.k_min();
}

std::optional<double> matched_reach_bound(const Vec& s0, const SmcGains& gains,
                                          const Mat& J, double eta_bar) {
  const double margin = gains.k_min() - sigma_max_gram(J) * eta_bar;
  if (!(margin > 0.0)) return std::nullopt;
  return s0.norm() / margin;
}

double noise_ultimate_bound(const SmcGains& gains, const Mat& J,
                            double eta_bar, double delta) {
  const double k = gains.k_min();
  if (!(k > 0.0)) throw std::invalid_argument("noise_ultimate_bound: k <= 0");
  return (k * delta + sigma_max_gram(J) * eta_bar) / k;
}

NtsmTimeBounds ntsm_time_bounds(const Vec& s0, const Vec& h0, double x_gap,
                                const NtsmConfig& cfg, double mu,
                                double lipschitz) {
  NtsmTimeBounds b;
  const double k1 = cfg.K1.minCoeff();
  const double k2 = cfg.K2.minCoeff();
  b.T1 = 2.0 / k1 *
         std::log(1.0 + k1 * std::pow(s0.norm(), 1.0 - cfg.rho) /
                            (k2 * (1.0 - cfg.rho)));
  const double h_max = h0.size() > 0 ? h0.lpNorm<Eigen::Infinity>() : 0.0;
  b.T2 = cfg.gamma / (cfg.gamma - 1.0) *
         std::pow(h_max, (cfg.gamma - 1.0) / cfg.gamma) /
         std::pow(cfg.beta, 1.0 / cfg.gamma);
  if (mu > 0.0 && lipschitz > 0.0) {
    const double c = mu / std::pow(lipschitz, cfg.p);
    b.T3 = 2.0 / (c * (2.0 - cfg.p)) *
           std::pow(0.5 * x_gap * x_gap, (2.0 - cfg.p) / 2.0);
  }
  return b;
}

double chattering_amplitude(const Trajectory& traj, double t_start) {
  return traj.max_violation_after(t_start);
}

SmcGains tune_gains(int m, double sigma_max_gram, double eta_bar, double delta,
                    double tau) {
  if (sigma_max_gram < 0.0 || eta_bar < 0.0 || delta < 0.0 || tau < 0.0) {
    throw std::invalid_argument("tune_gains: inputs must be nonnegative");
  }
  constexpr double kFloor = 1e-3;
  const double k = std::max(2.0 * sigma_max_gram * eta_bar, kFloor);
  double eps = tau * k + delta;
  if (!(eps > 0.0)) eps = kFloor * kFloor;
  return SmcGains::uniform(m, k, Switching::Saturation, eps);
}

RunReport summarize(const Trajectory& traj, double reaching_bound, double tol,
                    double dwell, const std::optional<Vec>& optimum) {
  RunReport r;
  r.reaching_time_bound = reaching_bound;
  r.diverged = traj.diverged;
  r.reaching_time_empirical = reaching_time(traj, tol, dwell);
  if (r.reaching_time_empirical) {
    const double tr = *r.reaching_time_empirical;
    r.max_violation_after_reach = traj.max_violation_after(tr);
    r.chattering_amplitude =
        chattering_amplitude(traj, tr + 0.5 * (traj.t_end() - tr));
    r.bound_satisfied = *r.reaching_time_empirical <= reaching_bound;
  } else {
    r.max_violation_after_reach = traj.max_violation_after(0.0);
    r.chattering_amplitude =
        chattering_amplitude(traj, 0.5 * traj.t_end());
  }
  if (optimum && !traj.empty()) {
    r.final_distance_to_optimum = (traj.final_state() - *optimum).norm();
  }
  return r;
}

void write_csv(const Trajectory& traj, std::ostream& os) {
  if (traj.empty()) return;
  const auto n = traj.states.front().size();
  const auto m = traj.violations.front().size();
  const auto lm = traj.multipliers.front().size();
  const auto sm = traj.sliding.front().size();
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
  for (Eigen::Index i = 1; i <= lm; ++i) os << ",lambda_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",h_" << i;
  for (Eigen::Index i = 1; i <= sm; ++i) os << ",S_" << i;
  os << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << traj.times[k];
    for (const Vec* v : {&traj.states[k], &traj.multipliers[k],
                         &traj.violations[k], &traj.sliding[k]}) {
      for (Eigen::Index i = 0; i < v->size(); ++i) os << ',' << (*v)(i);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace slideopt

#include "slideopt/controllers.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace slideopt {

SmcGains SmcGains::uniform(int m, double k, Switching sw, double eps) {
  SmcGains g;
  g.K = Vec::Constant(m, k);
  g.switching = sw;
  g.eps = eps;
  return g;
}

void SmcGains::validate() const {
  if (K.size() == 0 || (K.array() <= 0.0).any()) {
    throw std::invalid_argument("SmcGains: all K entries must be positive");
  }
  if (switching != Switching::Sign && !(eps > 0.0)) {
    throw std::invalid_argument("SmcGains: smoothed switching needs eps > 0");
  }
  if (linear_gain < 0.0 || gram_reg < 0.0) {
    throw std::invalid_argument("SmcGains: negative alpha or regularization");
  }
}

StaGains::StaGains(double k1, double k2, double reg)
    : K1(k1), K2(k2), gram_reg(reg) {
  if (!(k1 > 0.0) || !(k2 > 0.0)) {
    throw std::invalid_argument("StaGains: K1 and K2 must be positive");
  }
  if (!meets_sufficient_condition()) {
    std::cerr << "warning: super-twisting gains K1=" << k1 << ", K2=" << k2
              << " violate K1 > 2 sqrt(K2); finite-time convergence is not "
                 "guaranteed\n";
  }
}

bool StaGains::meets_sufficient_condition() const {
  return K1 > 2.0 * std::sqrt(K2);
}

StaGains StaGains::practical(double k2) {
  return StaGains(1.5 * std::sqrt(k2), k2);
}

NtsmConfig NtsmConfig::uniform(int m, double k1, double k2) {
  NtsmConfig c;
  c.K1 = Vec::Constant(m, k1);
  c.K2 = Vec::Constant(m, k2);
  return c;
}

void NtsmConfig::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("NtsmConfig: beta <= 0");
  if (!(gamma > 1.0 && gamma < 2.0)) {
    throw std::invalid_argument("NtsmConfig: gamma must lie in (1, 2)");
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("NtsmConfig: rho must lie in (0, 1)");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("NtsmConfig: p must lie in (0, 1)");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("NtsmConfig: eta <= 0");
  if (K1.size() == 0 || K1.size() != K2.size() || (K1.array() <= 0.0).any() ||
      (K2.array() <= 0.0).any()) {
    throw std::invalid_argument("NtsmConfig: K1, K2 must be positive");
  }
  if (!(z2_floor > 0.0) || !(grad_floor > 0.0) || gram_reg < 0.0) {
    throw std::invalid_argument("NtsmConfig: invalid floors");
  }
}

std::string controller_name(const ControllerConfig& cfg) {
  struct Visitor {
    std::string operator()(const SmcGains& g) const {
      return g.switching == Switching::Sign ? "smc" : "smc_smooth";
    }
    std::string operator()(const StaGains&) const { return "sta"; }
    std::string operator()(const NtsmConfig&) const { return "ntsmc"; }
    std::string operator()(const PdgdGains&) const { return "pdgd"; }
    std::string operator()(const PiCmoGains&) const { return "pi_cmo"; }
    std::string operator()(const PgfConfig&) const { return "pgf"; }
    std::string operator()(const ApfConfig&) const { return "apf"; }
  };
  return std::visit(Visitor{}, cfg);
}

Vec switching_term(const Vec& s, const SmcGains& gains) {
  if (gains.K.size() != s.size()) {
    throw DimensionError("switching_term: gain dimension mismatch");
  }
  Vec sw;
  switch (gains.switching) {
    case Switching::Sign:
      sw = sign(s);
      break;
    case Switching::Saturation:
      sw = sat(s, gains.eps);
      break;
    case Switching::Fraction:
      sw = s.array() / (s.array().abs() + gains.eps);
      break;
  }
  return gains.K.cwiseProduct(sw) + gains.linear_gain * s;
}

Vec smc_equivalent(const Problem& problem, const Vec& x,
                   const SmcGains& gains) {
  const Mat j = problem.jac(x);
  return -gram_solve(j, Vec(j * problem.grad(x)), gains.gram_reg);
}

Vec smc_lambda(const Problem& problem, const Vec& x, const SmcGains& gains) {
  return smc_lambda(problem, x, gains, problem.h(x));
}

Vec smc_lambda(const Problem& problem, const Vec& x, const SmcGains& gains,
               const Vec& s_measured) {
  const Mat j = problem.jac(x);
  const Vec rhs = j * problem.grad(x) - switching_term(s_measured, gains);
  return -gram_solve(j, rhs, gains.gram_reg);
}

StaOutput sta_step(const Vec& h, const Vec& z, const StaGains& gains) {
  if (h.size() != z.size()) {
    throw DimensionError("sta_step: dim(h) != dim(z)");
  }
  StaOutput out;
  out.u = -gains.K1 * signed_pow(h, 0.5) + z;
  out.z_dot = -gains.K2 * sign(h);
  return out;
}

Vec sta_lambda(const Problem& problem, const Vec& x, const Vec& u,
               double gram_reg) {
  const Mat j = problem.jac(x);
  return -gram_solve(j, Vec(j * problem.grad(x) + u), gram_reg);
}

Vec ntsm_sliding_variable(const Vec& z1, const Vec& z2,
                          const NtsmConfig& cfg) {
  if (z1.size() != z2.size()) {
    throw DimensionError("ntsm_sliding_variable: dim(z1) != dim(z2)");
  }
  return z1 + signed_pow(z2, cfg.gamma) / cfg.beta;
}

Vec normalized_gradient(const Vec& grad, const NtsmConfig& cfg) {
  const double n = grad.norm();
  if (n <= cfg.grad_floor) return Vec::Zero(grad.size());
  return grad / std::pow(n, cfg.p);
}

Vec normalized_gradient(const Problem& problem, const Vec& x,
                        const NtsmConfig& cfg) {
  return normalized_gradient(problem.grad(x), cfg);
}

Vec ntsm_drift(const Problem& problem, const Vec& x, const Vec& lam,
               const Vec& xdot, const NtsmConfig& cfg) {
  problem.check_lambda(lam);
  problem.check_x(xdot);
  const Mat j = problem.jac(x);

  // Directional derivative of f_p = g / ||g||^p along x':
  // J_fp v = (H v - p g_hat (g_hat^T H v)) / ||g||^p.
  Vec fp_dir = Vec::Zero(problem.dim_x);
  const Vec g = problem.grad(x);
  const double gn = g.norm();
  if (gn > cfg.grad_floor) {
    const Vec hv = problem.hess_phi(x) * xdot;
    const Vec g_hat = g / gn;
    fp_dir = (hv - cfg.p * g_hat * g_hat.dot(hv)) / std::pow(gn, cfg.p);
  }
  Vec a = -j * fp_dir;
  if (!problem.linear_constraints) {
    const auto hh = problem.hess_h(x);
    Vec jdot_t_lam = Vec::Zero(problem.dim_x);
    for (int i = 0; i < problem.dim_h; ++i) {
      const Vec hi_v = hh[static_cast<std::size_t>(i)] * xdot;
      a(i) += xdot.dot(hi_v);
      jdot_t_lam += lam(i) * hi_v;
    }
    a -= j * jdot_t_lam;
  }
  return a;
}

NtsmOutput ntsm_control(const Problem& problem, const Vec& x, const Vec& lam,
                        const Vec& xdot, const NtsmConfig& cfg) {
  const Mat j = problem.jac(x);
  const Vec z1 = problem.h(x);
  const Vec z2 = j * xdot;
  if (cfg.K1.size() != z1.size()) {
    throw DimensionError("ntsm_control: gain dimension mismatch");
  }
  const Vec s = ntsm_sliding_variable(z1, z2, cfg);
  const Vec a = ntsm_drift(problem, x, lam, xdot, cfg);
  const Vec factor =
      (cfg.beta / cfg.gamma) *
      z2.array().abs().max(cfg.z2_floor).pow(1.0 - cfg.gamma).matrix();
  const Vec reach = cfg.K1.cwiseProduct(s) +
                    cfg.K2.cwiseProduct(Vec(signed_pow(s, cfg.rho))) + z2;
  const Vec bracket =
      a + cfg.eta * Vec(sign(s)) + factor.cwiseProduct(reach);
  return {gram_solve(j, bracket, cfg.gram_reg), s, z2};
}

PdgdRates pdgd_rhs(const Problem& problem, const Vec& x, const Vec& lam,
                   const PdgdGains& gains) {
  problem.check_lambda(lam);
  const Mat j = problem.jac(x);
  return {-gains.primal * (problem.grad(x) + j.transpose() * lam),
          gains.dual * problem.h(x)};
}

Vec pi_cmo_lambda(const Vec& h_now, const Vec& h_integral,
                  const PiCmoGains& gains) {
  if (h_now.size() != h_integral.size()) {
    throw DimensionError("pi_cmo_lambda: dim(h) != dim(integral)");
  }
  return gains.Kp * h_now + gains.Ki * h_integral;
}

Vec pgf_rhs(const Problem& problem, const Vec& x, double reg) {
  return -projector(problem.jac(x), reg) * problem.grad(x);
}

Vec apf_control(const Vec& q, const Vec& q_goal,
                const std::vector<Obstacle>& obstacles, const ApfGains& gains) {
  if (q.size() != q_goal.size()) {
    throw DimensionError("apf_control: dim(q) != dim(q_goal)");
  }
  Vec u = -gains.k_att * (q - q_goal);
  for (const auto& obs : obstacles) {
    const Vec diff = q - obs.center;
    const double r = diff.norm();
    const double d = r - obs.radius;
    if (!(d > 0.0)) {
      throw std::domain_error("apf_control: configuration inside obstacle");
    }
    if (d < gains.d0) {
      // -grad of k_rep/2 (1/d - 1/d0)^2 with grad d = (q - c)/|q - c|.
      u += gains.k_rep * (1.0 / d - 1.0 / gains.d0) / (d * d) * (diff / r);
    }
  }
  return u;
}

}  // namespace slideopt

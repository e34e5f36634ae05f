#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slideopt/numerics.hpp"
#include "slideopt/problem.hpp"

namespace slideopt {

/// Switching nonlinearity applied to the sliding variable.
///  - Sign: ideal discontinuous law, sign(0) = 0.
///  - Saturation: sat(h / eps), boundary layer of width eps.
///  - Fraction: h / (|h| + eps), smooth everywhere.
enum class Switching { Sign, Saturation, Fraction };

/// Gains of the first-order sliding-mode multiplier law
///   lambda = -(J J^T)^{-1} [J grad phi - (K switch(h) + alpha h)].
struct SmcGains {
  Vec K;  ///< Diagonal of the gain matrix, one entry per constraint.
  Switching switching = Switching::Sign;
  double eps = 0.0;          ///< Boundary layer for Saturation / Fraction.
  double linear_gain = 0.0;  ///< alpha, optional proportional term.
  double gram_reg = kDefaultGramReg;

  static SmcGains uniform(int m, double k, Switching sw = Switching::Sign,
                          double eps = 0.0);
  double k_min() const { return K.minCoeff(); }
  double k_max() const { return K.maxCoeff(); }
  void validate() const;
};

/// Super-twisting gains. The sufficient condition for finite-time convergence
/// is K1 > 2 sqrt(K2); construction warns on stderr when it fails.
struct StaGains {
  double K1 = 0.0;
  double K2 = 0.0;
  double gram_reg = kDefaultGramReg;

  StaGains() = default;
  StaGains(double k1, double k2, double reg = kDefaultGramReg);
  bool meets_sufficient_condition() const;
  /// The practical choice K1 = 1.5 sqrt(K2).
  static StaGains practical(double k2);
};

/// Nonsingular terminal sliding-mode configuration (dual-rate law).
struct NtsmConfig {
  double beta = 2.0;
  double gamma = 1.5;
  double rho = 0.7;
  Vec K1;
  Vec K2;
  double eta = 0.5;
  double p = 0.5;
  double z2_floor = 1e-6;
  double grad_floor = 1e-12;
  double gram_reg = 0.0;

  static NtsmConfig uniform(int m, double k1, double k2);
  void validate() const;
};

struct PdgdGains {
  double primal = 1.0;
  double dual = 1.0;
};

struct PiCmoGains {
  double Kp = 1.0;
  double Ki = 1.0;
};

struct PgfConfig {
  double gram_reg = kDefaultGramReg;
};

struct Obstacle {
  Vec center;
  double radius = 0.0;
};

struct ApfGains {
  double k_att = 1.0;
  double k_rep = 1.0;
  double d0 = 1.6;  ///< influence distance measured from the obstacle surface
};

/// Potential-field baseline. It drives q' = -grad Phi(q) directly and does
/// not use the constraint plant.
struct ApfConfig {
  ApfGains gains;
  Vec goal;
  std::vector<Obstacle> obstacles;
};

using ControllerConfig = std::variant<SmcGains, StaGains, NtsmConfig,
                                      PdgdGains, PiCmoGains, PgfConfig,
                                      ApfConfig>;

std::string controller_name(const ControllerConfig& cfg);

// --- first-order sliding mode ---------------------------------------------

/// K switch(s) + alpha s, elementwise.
Vec switching_term(const Vec& s, const SmcGains& gains);

/// lambda_eq = -(J J^T)^{-1} J grad phi.
Vec smc_equivalent(const Problem& problem, const Vec& x,
                   const SmcGains& gains);

/// Full sliding-mode multiplier using the true constraint value as the
/// sliding variable.
Vec smc_lambda(const Problem& problem, const Vec& x, const SmcGains& gains);

/// Same law driven by an externally supplied (possibly noisy) sliding
/// variable measurement.
Vec smc_lambda(const Problem& problem, const Vec& x, const SmcGains& gains,
               const Vec& s_measured);

// --- super-twisting --------------------------------------------------------

struct StaOutput {
  Vec u;
  Vec z_dot;
};

/// u = -K1 |h|^{1/2} sgn(h) + z, z' = -K2 sgn(h), elementwise.
StaOutput sta_step(const Vec& h, const Vec& z, const StaGains& gains);

/// Multiplier that realizes h' = u on the nominal plant:
/// lambda = -(J J^T)^{-1} (J grad phi + u).
Vec sta_lambda(const Problem& problem, const Vec& x, const Vec& u,
               double gram_reg);

// --- nonsingular terminal sliding mode -------------------------------------

/// S = z1 + (1/beta) |z2|^gamma sgn(z2).
Vec ntsm_sliding_variable(const Vec& z1, const Vec& z2, const NtsmConfig& cfg);

/// grad phi / ||grad phi||^p, zero when ||grad phi|| <= grad_floor.
Vec normalized_gradient(const Vec& grad, const NtsmConfig& cfg);
Vec normalized_gradient(const Problem& problem, const Vec& x,
                        const NtsmConfig& cfg);

/// Nominal drift of h'' along x' = -f_p(x) - J^T lambda + xi:
///   a = H_h[x', x'] - J J_fp x' - J (d/dt J^T) lambda
/// (the xi' contribution is unknown to the controller and omitted).
Vec ntsm_drift(const Problem& problem, const Vec& x, const Vec& lam,
               const Vec& xdot, const NtsmConfig& cfg);

struct NtsmOutput {
  Vec u;
  Vec sliding;
  Vec z2;
};

/// Dual-rate input
///   u = (J J^T)^{-1} [a + eta sgn(S)
///        + (beta/gamma) |z2|^{1-gamma} (K1 S + K2 |S|^rho sgn(S) + z2)],
/// with z1 = h(x), z2 = J x' and |z2| clamped below at z2_floor inside the
/// singular factor.
NtsmOutput ntsm_control(const Problem& problem, const Vec& x, const Vec& lam,
                        const Vec& xdot, const NtsmConfig& cfg);

// --- baselines -------------------------------------------------------------

struct PdgdRates {
  Vec xdot;
  Vec lamdot;
};

/// x' = -k_x (grad phi + J^T lambda), lambda' = k_lambda h(x).
PdgdRates pdgd_rhs(const Problem& problem, const Vec& x, const Vec& lam,
                   const PdgdGains& gains);

/// lambda = Kp h + Ki int h dt.
Vec pi_cmo_lambda(const Vec& h_now, const Vec& h_integral,
                  const PiCmoGains& gains);

/// -P(x) grad phi(x).
Vec pgf_rhs(const Problem& problem, const Vec& x, double reg);

/// -grad of the attractive + inverse-distance repulsive potential.
/// Throws std::domain_error when q is inside an obstacle.
Vec apf_control(const Vec& q, const Vec& q_goal,
                const std::vector<Obstacle>& obstacles, const ApfGains& gains);

}  // namespace slideopt

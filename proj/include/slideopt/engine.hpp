#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slideopt/controllers.hpp"
#include "slideopt/disturbances.hpp"
#include "slideopt/problem.hpp"

namespace slideopt {

enum class Method { Euler, Rk4 };

struct IntegratorConfig {
  Method method = Method::Euler;
  double dt = 1e-4;
  double t_final = 1.0;
  int record_stride = 1;
  /// ||x||_inf above this truncates the run and flags divergence.
  double divergence_threshold = 1e9;

  void validate() const;
};

/// Recorded closed-loop samples. All per-sample vectors have equal length and
/// times are strictly increasing.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;       ///< x
  std::vector<Vec> multipliers;  ///< lambda
  std::vector<Vec> violations;   ///< h(x)
  std::vector<Vec> sliding;      ///< sliding variable (true value)
  std::vector<Vec> aux;          ///< controller internals (z, integral, z2)
  bool diverged = false;
  std::optional<double> divergence_time;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double t_end() const { return times.back(); }
  const Vec& final_state() const { return states.back(); }
  /// max ||h||_inf over samples with t >= t_start.
  double max_violation_after(double t_start) const;
  /// max ||S||_2 over samples with t >= t_start.
  double max_sliding_norm_after(double t_start) const;
};

/// Integrates the closed loop of `controller` on `problem` under
/// `disturbance`, starting at (x0, lam0). Static-multiplier laws ignore lam0.
///
/// Ideal sign switching requires Method::Euler. A state with non-finite
/// entries or ||x||_inf above the divergence threshold ends the run with
/// Trajectory::diverged set.
Trajectory simulate(const Problem& problem, const ControllerConfig& controller,
                    const DisturbanceSpec& disturbance, const Vec& x0,
                    const Vec& lam0, const IntegratorConfig& icfg);

inline constexpr double kDefaultDwell = 0.05;

/// First recorded time t* such that ||h||_inf <= tol on every sample in
/// [t*, t* + dwell]. The window must fit inside the trajectory.
std::optional<double> reaching_time(const Trajectory& traj, double tol,
                                    double dwell = kDefaultDwell);

/// sqrt(2) ||h0||_2 / k_min.
double smc_reach_bound(const Vec& h0, const SmcGains& gains);

/// ||S0||_2 / eps with eps = k_min - sigma_max(J J^T) eta_bar; empty when
/// eps <= 0.
std::optional<double> matched_reach_bound(const Vec& s0, const SmcGains& gains,
                                          const Mat& J, double eta_bar);

/// (k_min delta + sigma_max(J J^T) eta_bar) / k_min.
double noise_ultimate_bound(const SmcGains& gains, const Mat& J,
                            double eta_bar, double delta);

struct NtsmTimeBounds {
  double T1 = 0.0;  ///< reaching of S = 0
  double T2 = 0.0;  ///< h, h' -> 0 on the terminal manifold
  std::optional<double> T3;  ///< optimality phase; needs mu, L > 0
  double constraint_total() const { return T1 + T2; }
};

NtsmTimeBounds ntsm_time_bounds(const Vec& s0, const Vec& h0, double x_gap,
                                const NtsmConfig& cfg, double mu,
                                double lipschitz);

/// max_{t >= t_start} ||h(x(t))||_inf.
double chattering_amplitude(const Trajectory& traj, double t_start);

/// K = max(2 sigma_max(J J^T) eta_bar, 1e-3) with saturation smoothing of
/// width eps = tau K + delta.
SmcGains tune_gains(int m, double sigma_max_gram, double eta_bar, double delta,
                    double tau);

struct RunReport {
  std::optional<double> reaching_time_empirical;
  double reaching_time_bound = 0.0;
  double max_violation_after_reach = 0.0;
  double chattering_amplitude = 0.0;
  std::optional<double> final_distance_to_optimum;
  bool diverged = false;
  bool bound_satisfied = false;
};

/// Computes metrics on `traj` and pairs them with a theoretical reaching
/// bound. bound_satisfied requires a finite empirical time not above the
/// bound. The chattering amplitude is taken over the second half of the
/// post-reaching interval (second half of the run when never reached).
RunReport summarize(const Trajectory& traj, double reaching_bound, double tol,
                    double dwell = kDefaultDwell,
                    const std::optional<Vec>& optimum = std::nullopt);

/// CSV with header t,x_1..x_n,lambda_1..lambda_m,h_1..h_m,S_1..S_m, one row
/// per sample, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& os);

}  // namespace slideopt

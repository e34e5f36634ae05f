#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "slideopt/numerics.hpp"
#include "slideopt/problem.hpp"

namespace slideopt {

/// xi(t, x) = J_h(x)^T eta(t, x) with ||eta|| <= eta_bar.
struct MatchedDisturbance {
  std::function<Vec(double, const Vec&)> eta;
  double eta_bar = 0.0;
};

/// Actuation matrix J_h + dJ(t); sigma_min of its Gram matrix must stay above
/// alpha_floor.
struct StructuredUncertainty {
  std::function<Mat(double)> delta_j;
  double alpha_floor = 0.0;
};

/// Additive noise on the sliding-variable measurement, ||noise(t)|| <= delta.
struct MeasurementNoise {
  std::function<Vec(double)> noise;
  double delta = 0.0;
};

/// Bounded additive input xi(t) on the primal dynamics, ||xi(t)|| <= bound.
/// Used by the dual-rate (terminal sliding) plant, which only assumes
/// boundedness of xi and xi'.
struct AdditiveDisturbance {
  std::function<Vec(double)> xi;
  double bound = 0.0;
};

/// Perturbations active in one run. Any combination may be present; an empty
/// spec is the nominal plant.
struct DisturbanceSpec {
  std::optional<MatchedDisturbance> matched;
  std::optional<StructuredUncertainty> structured;
  std::optional<MeasurementNoise> noise;
  std::optional<AdditiveDisturbance> additive;

  bool nominal() const {
    return !matched && !structured && !noise && !additive;
  }
  double eta_bar() const { return matched ? matched->eta_bar : 0.0; }
  double delta() const { return noise ? noise->delta : 0.0; }
};

/// Thrown when a disturbance is used in a role it does not have, or when a
/// declared bound is violated during a run.
class DisturbanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// xi = J_h(x)^T eta(t, x). Throws DisturbanceError when no matched
/// component is configured or ||eta|| exceeds eta_bar.
Vec apply_matched(const Problem& problem, const DisturbanceSpec& d, double t,
                  const Vec& x);

/// J_h(x) + dJ(t), asserting sigma_min(J~ J~^T) >= alpha_floor.
Mat perturbed_jacobian(const Problem& problem, const DisturbanceSpec& d,
                       double t, const Vec& x);

/// S + noise(t), asserting ||noise(t)|| <= delta.
Vec noisy_sliding_measurement(const Vec& s, const DisturbanceSpec& d,
                              double t);

// --- bundled signal generators ---------------------------------------------

/// eta(t) = amplitude * sin(omega t + phase) * direction, with direction
/// normalized. Bound: |amplitude|.
MatchedDisturbance sinusoidal_matched(const Vec& direction, double amplitude,
                                      double omega, double phase = 0.0);

/// Componentwise sinusoids with distinct frequencies, scaled so that the
/// Euclidean norm never exceeds eta_bar.
MatchedDisturbance multisine_matched(int m, double eta_bar,
                                     std::uint64_t seed);

/// Piecewise-constant uniform noise: on each interval of length hold the
/// components are i.i.d. uniform on [-delta/sqrt(m), delta/sqrt(m)], so the
/// Euclidean norm is at most delta. The value for a given t depends only on
/// (seed, floor(t / hold)).
MeasurementNoise uniform_noise(int m, double delta, std::uint64_t seed,
                               double hold);

/// dJ(t) = amplitude * sin(omega t) * pattern.
StructuredUncertainty sinusoidal_jacobian_error(const Mat& pattern,
                                                double amplitude, double omega,
                                                double alpha_floor);

/// xi(t) = amplitude * sin(omega t) * 1. Bound: |amplitude| sqrt(n).
AdditiveDisturbance sinusoidal_additive(int n, double amplitude, double omega);

}  // namespace slideopt

#include "slideopt/disturbances.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace slideopt {

namespace {

// Slack for floating-point round-off when checking declared bounds.
constexpr double kBoundSlack = 1e-12;

std::string at_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << " at t = " << t;
  return os.str();
}

}  // namespace

Vec apply_matched(const Problem& problem, const DisturbanceSpec& d, double t,
                  const Vec& x) {
  if (!d.matched) {
    throw DisturbanceError("apply_matched: no matched disturbance configured");
  }
  const Vec eta = d.matched->eta(t, x);
  if (eta.size() != problem.dim_h) {
    throw DimensionError("apply_matched: dim(eta) != dim(h)");
  }
  if (eta.norm() > d.matched->eta_bar * (1.0 + kBoundSlack) + kBoundSlack) {
    throw DisturbanceError("apply_matched: ||eta|| exceeds eta_bar" +
                           at_time(t));
  }
  return problem.jac(x).transpose() * eta;
}

Mat perturbed_jacobian(const Problem& problem, const DisturbanceSpec& d,
                       double t, const Vec& x) {
  if (!d.structured) {
    throw DisturbanceError(
        "perturbed_jacobian: no structured uncertainty configured");
  }
  const Mat jt = problem.jac(x) + d.structured->delta_j(t);
  if (sigma_min_gram(jt) < d.structured->alpha_floor) {
    throw DisturbanceError(
        "perturbed_jacobian: sigma_min of the perturbed Gram matrix fell "
        "below the floor" +
        at_time(t));
  }
  return jt;
}

Vec noisy_sliding_measurement(const Vec& s, const DisturbanceSpec& d,
                              double t) {
  if (!d.noise) {
    throw DisturbanceError(
        "noisy_sliding_measurement: no measurement noise configured");
  }
  const Vec n = d.noise->noise(t);
  if (n.size() != s.size()) {
    throw DimensionError("noisy_sliding_measurement: dimension mismatch");
  }
  if (n.norm() > d.noise->delta * (1.0 + kBoundSlack) + kBoundSlack) {
    throw DisturbanceError("noisy_sliding_measurement: noise exceeds delta" +
                           at_time(t));
  }
  return s + n;
}

MatchedDisturbance sinusoidal_matched(const Vec& direction, double amplitude,
                                      double omega, double phase) {
  const Vec dir = direction.normalized();
  return {[dir, amplitude, omega, phase](double t, const Vec&) -> Vec {
            return amplitude * std::sin(omega * t + phase) * dir;
          },
          std::abs(amplitude)};
}

MatchedDisturbance multisine_matched(int m, double eta_bar,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(0.5, 5.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  Vec omega(m), phi(m);
  for (int i = 0; i < m; ++i) {
    omega(i) = freq(rng);
    phi(i) = phase(rng);
  }
  const double scale = eta_bar / std::sqrt(static_cast<double>(m));
  return {[omega, phi, scale](double t, const Vec&) -> Vec {
            return scale * (omega * t + phi).array().sin().matrix();
          },
          eta_bar};
}

MeasurementNoise uniform_noise(int m, double delta, std::uint64_t seed,
                               double hold) {
  if (!(hold > 0.0)) throw std::invalid_argument("uniform_noise: hold <= 0");
  const double half_width = delta / std::sqrt(static_cast<double>(m));
  return {[m, half_width, seed, hold](double t) -> Vec {
            const auto bucket =
                static_cast<std::uint64_t>(std::llround(std::floor(t / hold)));
            std::seed_seq seq{static_cast<std::uint32_t>(seed),
                              static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(bucket),
                              static_cast<std::uint32_t>(bucket >> 32)};
            std::mt19937_64 rng(seq);
            std::uniform_real_distribution<double> u(-half_width, half_width);
            Vec n(m);
            for (int i = 0; i < m; ++i) n(i) = u(rng);
            return n;
          },
          delta};
}

StructuredUncertainty sinusoidal_jacobian_error(const Mat& pattern,
                                                double amplitude, double omega,
                                                double alpha_floor) {
  return {[pattern, amplitude, omega](double t) -> Mat {
            return amplitude * std::sin(omega * t) * pattern;
          },
          alpha_floor};
}

AdditiveDisturbance sinusoidal_additive(int n, double amplitude,
                                        double omega) {
  return {[n, amplitude, omega](double t) -> Vec {
            return Vec::Constant(n, amplitude * std::sin(omega * t));
          },
          std::abs(amplitude) * std::sqrt(static_cast<double>(n))};
}

}  // namespace slideopt

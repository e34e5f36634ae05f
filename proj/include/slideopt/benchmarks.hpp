#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slideopt/controllers.hpp"
#include "slideopt/disturbances.hpp"
#include "slideopt/engine.hpp"
#include "slideopt/problem.hpp"

namespace slideopt {

/// Expected value of a named run metric.
struct Expectation {
  enum class Kind { Near, AtMost, AtLeast };
  double value = 0.0;
  double tol = 0.0;
  Kind kind = Kind::Near;

  bool holds(double measured) const;
};

/// Data specific to the multi-agent estimation case.
struct ConsensusInfo {
  int agents = 0;
  int dim = 0;
  Mat laplacian;       ///< full N x N graph Laplacian
  Vec theta_star;      ///< centralized weighted least-squares estimate
  Vec theta_true;
  std::vector<Mat> H;  ///< per-agent regressors
  std::vector<Vec> y;  ///< per-agent measurements
};

struct BenchmarkCase {
  std::string name;
  Problem problem;
  ControllerConfig default_controller;
  std::vector<ControllerConfig> baselines;
  DisturbanceSpec disturbance;
  IntegratorConfig integrator;
  /// Initial state for a given seed; deterministic cases ignore the seed.
  std::function<Vec(std::uint64_t)> x0_rule;
  Vec lambda0;
  std::optional<KktPoint> optimum;
  /// Reference point for final-distance metrics; defaults to the optimum.
  std::optional<Vec> target;
  /// Keys are "<controller name>.<metric>".
  std::map<std::string, Expectation> expected;
  double tol = 1e-3;
  std::optional<ConsensusInfo> consensus;

  Vec x0(std::uint64_t seed = 0) const { return x0_rule(seed); }
};

/// min 1/2 w x^2 s.t. x = 0 with ideal SMC gain K.
BenchmarkCase example1(double w = 1.0, double K = 1.0, double x0 = 1.0);

/// Indefinite QP, W = diag(1, -1), h = 2 x_2, under xi = (0, 2 sin t).
BenchmarkCase nonconvex_qp(double K = 20.0);

/// Planar goal reaching with circle constraints at (3, +-1), radius 0.8,
/// goal (6, 0) and matched disturbance of amplitude eta_max.
BenchmarkCase obstacle_course(double K = 20.0, double eta_max = 0.3);

/// 4x4 Sudoku as 36 polynomial equalities over the 12 free cells. The
/// initial state for run seed s is uniform on [1, 4]^12 from stream seed + s.
BenchmarkCase shidoku(double K = 5.0, double alpha = 0.1, double eps = 1e-3,
                      double mu_reg = 1e-6, std::uint64_t seed = 0);

enum class Topology { Ring, Path, Complete };

Topology parse_topology(const std::string& name);

/// Laplacian of an undirected graph on n nodes.
Mat graph_laplacian(int n, const std::vector<std::pair<int, int>>& edges);
Mat graph_laplacian(int n, Topology topology);
/// True iff the Laplacian has exactly one eigenvalue below 1e-9.
bool laplacian_connected(const Mat& L);

/// Distributed least squares with consensus constraints
/// (L (x) I_n) x = 0 and NTSM control. Throws std::invalid_argument for a
/// disconnected graph.
BenchmarkCase consensus_estimation(int N = 5, int n = 3,
                                   Topology topology = Topology::Ring,
                                   std::uint64_t seed = 0,
                                   std::optional<NtsmConfig> cfg = std::nullopt);
BenchmarkCase consensus_estimation(const Mat& laplacian, int n,
                                   std::uint64_t seed,
                                   std::optional<NtsmConfig> cfg = std::nullopt);

/// Default NTSM configuration of the estimation case for m constraints.
NtsmConfig consensus_ntsm_config(int m);

// --- Shidoku helpers ---------------------------------------------------------

using ShidokuGrid = std::array<std::array<int, 4>, 4>;

/// Clue cells as (row, col, value), 0-based.
const std::vector<std::array<int, 3>>& shidoku_clues();
/// Free cells in row-major order, matching the state layout.
const std::vector<std::pair<int, int>>& shidoku_free_cells();
/// Rounds the 12 free values to the nearest integer and fills in the clues.
ShidokuGrid shidoku_grid(const Vec& x);
/// Rows, columns and 2x2 blocks are permutations of 1..4 and the clues
/// hold.
bool shidoku_valid(const ShidokuGrid& grid);
/// The unique completion of the clue set, as a state vector.
Vec shidoku_solution();

// --- registry ----------------------------------------------------------------

using ParamMap = std::map<std::string, double>;

std::vector<std::string> benchmark_names();
/// Builds a case by name with numeric parameter overrides. Unknown names or
/// parameters throw std::invalid_argument.
BenchmarkCase make_benchmark(const std::string& name,
                             const ParamMap& params = {});
/// Parameter names accepted by make_benchmark for this case.
std::vector<std::string> benchmark_params(const std::string& name);

}  // namespace slideopt

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slideopt/benchmarks.hpp"
#include "slideopt/engine.hpp"

namespace slideopt {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Everything a batch run needs. Keys of the flat text form:
///
///   benchmark = nonconvex_qp
///   benchmark.K = 20
///   controllers = smc, pdgd, pi_cmo
///   controller.smc.K = 20
///   disturbance = matched+noise
///   disturbance.noise_delta = 0.05
///   integrator.method = euler
///   integrator.dt = 1e-4
///   integrator.t_final = 10
///   integrator.record_stride = 10
///   seeds = 1, 2, 3
///   output_dir = out
///   report.tol = 1e-3
///   report.dwell = 0.05
///   jobs = 4
struct RunConfig {
  std::string benchmark = "example1";
  ParamMap benchmark_params;
  /// Empty selects the benchmark's default controller.
  std::vector<std::string> controllers;
  std::map<std::string, ParamMap> controller_params;
  std::string disturbance = "default";
  ParamMap disturbance_params;
  std::optional<Method> method;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<int> record_stride;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "slideopt_out";
  double tol = 1e-3;
  double dwell = kDefaultDwell;
  int jobs = 0;  ///< 0 uses the hardware concurrency

  void validate() const;
};

/// Assigns one dotted key. Throws ConfigError on unknown keys or malformed
/// values.
void set_config_value(RunConfig& cfg, const std::string& key,
                      const std::string& value);

/// Reads `key = value` lines; blank lines and lines starting with '#' are
/// skipped.
void apply_config_text(RunConfig& cfg, std::istream& in);
void apply_config_file(RunConfig& cfg, const std::string& path);

/// Applies SLIDEOPT_* variables from a null-terminated environment block.
/// A double underscore separates key components and section names are
/// lowercased, so SLIDEOPT_INTEGRATOR__T_FINAL sets integrator.t_final and
/// SLIDEOPT_CONTROLLER__SMC__K sets controller.smc.K.
void apply_env_overrides(RunConfig& cfg, char** envp);

std::vector<std::string> controller_names();
std::vector<std::string> disturbance_names();

/// Controller `name` configured for `bench`, starting from the benchmark's
/// own settings where it has them.
ControllerConfig make_controller(const BenchmarkCase& bench,
                                 const std::string& name,
                                 const ParamMap& overrides = {});

/// Disturbance by name; components may be combined with '+', for example
/// "matched+noise". "default" is the benchmark's own disturbance.
DisturbanceSpec make_disturbance(const BenchmarkCase& bench,
                                 const std::string& spec,
                                 const ParamMap& params, const Vec& x0,
                                 double dt, std::uint64_t seed);

enum class Feasibility { Finite, Asymptotic, Failed };
std::string to_string(Feasibility f);

struct RunResult {
  std::string controller;
  std::uint64_t seed = 0;
  Trajectory trajectory;
  RunReport report;
  /// Named scalar metrics; absent values are NaN.
  std::map<std::string, double> metrics;
  Feasibility feasibility = Feasibility::Failed;
  std::string error;  ///< non-empty when the run threw
};

struct ComparisonRow {
  std::string controller;
  std::optional<double> reaching_time;  ///< worst case over seeds
  Feasibility feasibility = Feasibility::Failed;
  double final_objective = 0.0;  ///< mean over seeds
  bool bound_satisfied = false;  ///< on every seed
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  static ComparisonTable build(const std::vector<RunResult>& runs,
                               const std::vector<std::string>& controllers);
  void write_csv(std::ostream& os) const;
  void print(std::ostream& os) const;
};

struct ExpectationCheck {
  std::string key;
  std::uint64_t seed = 0;
  Expectation expected;
  double measured = 0.0;
  bool passed = false;
};

struct RunOutcome {
  std::vector<std::string> controllers;
  std::vector<RunResult> runs;
  ComparisonTable table;
  /// Benchmark expectations; runs of controllers with parameter overrides
  /// are not checked.
  std::vector<ExpectationCheck> checks;
  bool all_passed() const;
};

/// Executes every (controller, seed) pair, in parallel, without touching
/// the filesystem. Results are ordered by controller, then seed.
RunOutcome execute(const RunConfig& cfg);

/// Writes the plain-text report of an outcome.
void write_report(const RunConfig& cfg, const RunOutcome& outcome,
                  std::ostream& os);

/// Exit codes of the command layer.
inline constexpr int kExitOk = 0;
inline constexpr int kExitExpectationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// Runs and writes `<out>/<benchmark>_<controller>_seed<k>.csv`,
/// `<out>/report.txt` and, for several controllers, `<out>/comparison.csv`.
int run_command(const RunConfig& cfg, std::ostream& log);

/// One run per axis value under `<out>/<axis>=<value>/` plus the aggregate
/// `<out>/sweep.csv`.
int sweep_command(const RunConfig& cfg, const std::string& axis,
                  const std::vector<std::string>& values, std::ostream& log);

int list_command(std::ostream& os);

}  // namespace slideopt

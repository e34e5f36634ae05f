#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "slideopt/cli_report.hpp"

extern char** environ;

namespace {

struct Flags {
  std::string config;
  std::string benchmark;
  std::string controllers;
  std::string disturbance;
  std::string method;
  std::string seeds;
  std::string out;
  double dt = 0.0;
  double t_final = 0.0;
  double tol = 0.0;
  int jobs = -1;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("-c,--config", f.config, "key = value configuration file");
  cmd->add_option("--benchmark", f.benchmark, "benchmark name");
  cmd->add_option("--controller,--controllers", f.controllers,
                  "controller name or comma-separated list");
  cmd->add_option("--disturbance", f.disturbance,
                  "disturbance, components joined with '+'");
  cmd->add_option("--method", f.method, "euler or rk4");
  cmd->add_option("--dt", f.dt, "integration step");
  cmd->add_option("--t-final", f.t_final, "simulated horizon");
  cmd->add_option("--seed,--seeds", f.seeds, "seed or comma-separated list");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--tol", f.tol, "feasibility tolerance");
  cmd->add_option("--jobs", f.jobs, "parallel workers (0 = all cores)");
  cmd->add_option("--set", f.sets, "extra key=value assignment")
      ->take_all();
  cmd->allow_extras();
}

// Flags > environment > config file > defaults. Unrecognized --name value
// pairs go to the benchmark when it has that parameter, else to the first
// selected controller.
slideopt::RunConfig resolve(const Flags& f, const CLI::App* cmd) {
  using slideopt::set_config_value;
  slideopt::RunConfig cfg;
  if (!f.config.empty()) slideopt::apply_config_file(cfg, f.config);
  slideopt::apply_env_overrides(cfg, environ);
  if (!f.benchmark.empty()) cfg.benchmark = f.benchmark;
  if (!f.controllers.empty()) set_config_value(cfg, "controllers", f.controllers);
  if (!f.disturbance.empty()) cfg.disturbance = f.disturbance;
  if (!f.method.empty()) set_config_value(cfg, "integrator.method", f.method);
  if (f.dt > 0.0) cfg.dt = f.dt;
  if (f.t_final > 0.0) cfg.t_final = f.t_final;
  if (!f.seeds.empty()) set_config_value(cfg, "seeds", f.seeds);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.tol > 0.0) cfg.tol = f.tol;
  if (f.jobs >= 0) cfg.jobs = f.jobs;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw slideopt::ConfigError("--set expects key=value, got '" + s + "'");
    }
    set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }

  const auto extras = cmd->remaining();
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string name = extras[i];
    if (name.rfind("--", 0) != 0) {
      throw slideopt::ConfigError("unexpected argument '" + name + "'");
    }
    name = name.substr(2);
    std::string value;
    if (const auto eq = name.find('='); eq != std::string::npos) {
      value = name.substr(eq + 1);
      name = name.substr(0, eq);
    } else if (i + 1 < extras.size()) {
      value = extras[++i];
    } else {
      throw slideopt::ConfigError("--" + name + " needs a value");
    }
    const auto params = slideopt::benchmark_params(cfg.benchmark);
    if (std::find(params.begin(), params.end(), name) != params.end()) {
      set_config_value(cfg, "benchmark." + name, value);
    } else {
      const std::string ctl = cfg.controllers.empty()
                                  ? slideopt::controller_name(
                                        slideopt::make_benchmark(cfg.benchmark)
                                            .default_controller)
                                  : cfg.controllers.front();
      set_config_value(cfg, "controller." + ctl + "." + name, value);
    }
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-mode constrained optimization runner"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "simulate one benchmark");
  add_common(run, run_flags);

  Flags sweep_flags;
  std::string axis;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "repeat a run over parameter values");
  add_common(sweep, sweep_flags);
  sweep->add_option("--axis", axis, "configuration key to vary")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  app.add_subcommand("list", "list benchmarks, controllers and disturbances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : slideopt::kExitUsage;
  }

  try {
    if (app.got_subcommand("list")) return slideopt::list_command(std::cout);
    if (app.got_subcommand("run")) {
      return slideopt::run_command(resolve(run_flags, run), std::cout);
    }
    std::vector<std::string> list;
    std::string item;
    std::istringstream in(values);
    while (std::getline(in, item, ',')) {
      if (!item.empty()) list.push_back(item);
    }
    return slideopt::sweep_command(resolve(sweep_flags, sweep), axis, list,
                                   std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return slideopt::kExitUsage;
  }
}

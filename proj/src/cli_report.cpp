#include "slideopt/cli_report.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace slideopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items,
                 const std::string& sep = ", ") {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : sep) + s;
  return out;
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_seed(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("'" + key + "': expected a nonnegative integer, got '" +
                      text + "'");
  }
  return v;
}

Method parse_method(const std::string& s) {
  if (s == "euler") return Method::Euler;
  if (s == "rk4") return Method::Rk4;
  throw ConfigError("integrator.method: expected euler or rk4, got '" + s +
                    "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void check_params(const ParamMap& given, const std::vector<std::string>& allowed,
                  const std::string& what) {
  for (const auto& [k, v] : given) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ConfigError(what + " has no parameter '" + k + "' (valid: " +
                        join(allowed) + ")");
    }
  }
}

double param_or(const ParamMap& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace

// --- configuration -------------------------------------------------------

void RunConfig::validate() const {
  if (benchmark.empty()) throw ConfigError("benchmark is not set");
  const auto names = benchmark_names();
  if (std::find(names.begin(), names.end(), benchmark) == names.end()) {
    throw ConfigError("unknown benchmark '" + benchmark +
                      "' (valid: " + join(names) + ")");
  }
  const auto valid = controller_names();
  for (const auto& c : controllers) {
    if (std::find(valid.begin(), valid.end(), c) == valid.end()) {
      throw ConfigError("unknown controller '" + c + "' (valid: " +
                        join(valid) + ")");
    }
  }
  for (const auto& [c, p] : controller_params) {
    if (std::find(valid.begin(), valid.end(), c) == valid.end()) {
      throw ConfigError("controller." + c + ": unknown controller (valid: " +
                        join(valid) + ")");
    }
  }
  if (dt && !(*dt > 0.0)) throw ConfigError("integrator.dt must be positive");
  if (t_final && !(*t_final > 0.0)) {
    throw ConfigError("integrator.t_final must be positive");
  }
  if (record_stride && *record_stride < 1) {
    throw ConfigError("integrator.record_stride must be >= 1");
  }
  if (seeds.empty()) throw ConfigError("seeds is empty");
  if (!(tol > 0.0) || !(dwell > 0.0)) {
    throw ConfigError("report.tol and report.dwell must be positive");
  }
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
}

void set_config_value(RunConfig& cfg, const std::string& raw_key,
                      const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  const auto parts = split(key, '.');
  if (parts.empty()) throw ConfigError("empty configuration key");
  const std::string& head = parts[0];

  if (parts.size() == 1) {
    if (head == "benchmark") {
      cfg.benchmark = value;
    } else if (head == "controllers" || head == "controller") {
      cfg.controllers = split(value, ',');
    } else if (head == "disturbance") {
      cfg.disturbance = value;
    } else if (head == "seeds" || head == "seed") {
      cfg.seeds.clear();
      for (const auto& s : split(value, ',')) {
        cfg.seeds.push_back(parse_seed(s, key));
      }
    } else if (head == "output_dir") {
      cfg.output_dir = value;
    } else if (head == "jobs") {
      cfg.jobs = static_cast<int>(parse_double(value, key));
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
    return;
  }
  if (head == "benchmark" && parts.size() == 2) {
    cfg.benchmark_params[parts[1]] = parse_double(value, key);
  } else if (head == "controller" && parts.size() == 3) {
    cfg.controller_params[parts[1]][parts[2]] = parse_double(value, key);
  } else if (head == "disturbance" && parts.size() == 2) {
    cfg.disturbance_params[parts[1]] = parse_double(value, key);
  } else if (head == "integrator" && parts.size() == 2) {
    const std::string& k = parts[1];
    if (k == "method") {
      cfg.method = parse_method(value);
    } else if (k == "dt") {
      cfg.dt = parse_double(value, key);
    } else if (k == "t_final") {
      cfg.t_final = parse_double(value, key);
    } else if (k == "record_stride") {
      cfg.record_stride = static_cast<int>(parse_double(value, key));
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  } else if (head == "report" && parts.size() == 2) {
    if (parts[1] == "tol") {
      cfg.tol = parse_double(value, key);
    } else if (parts[1] == "dwell") {
      cfg.dwell = parse_double(value, key);
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void apply_config_text(RunConfig& cfg, std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    try {
      set_config_value(cfg, t.substr(0, eq), t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  apply_config_text(cfg, in);
}

void apply_env_overrides(RunConfig& cfg, char** envp) {
  if (envp == nullptr) return;
  static const std::string prefix = "SLIDEOPT_";
  for (char** e = envp; *e != nullptr; ++e) {
    const std::string entry(*e);
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) continue;
    const std::string name = entry.substr(prefix.size(), eq - prefix.size());
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto pos = name.find("__", start);
      parts.push_back(name.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 2;
    }
    std::string key;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      std::string part = parts[i];
      // Parameter names keep their case; section names do not.
      if (parts.size() == 1 || i + 1 < parts.size() || parts[0] == "INTEGRATOR" ||
          parts[0] == "REPORT") {
        std::transform(part.begin(), part.end(), part.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
      }
      key += (i ? "." : "") + part;
    }
    set_config_value(cfg, key, entry.substr(eq + 1));
  }
}

// --- controllers and disturbances ----------------------------------------

std::vector<std::string> controller_names() {
  return {"smc", "smc_smooth", "sta", "ntsmc", "pdgd", "pi_cmo", "pgf", "apf"};
}

std::vector<std::string> disturbance_names() {
  return {"default", "none", "matched", "noise", "structured", "additive"};
}

namespace {

template <typename T>
std::optional<T> find_config(const BenchmarkCase& bench) {
  if (const auto* v = std::get_if<T>(&bench.default_controller)) return *v;
  for (const auto& b : bench.baselines) {
    if (const auto* v = std::get_if<T>(&b)) return *v;
  }
  return std::nullopt;
}

std::optional<SmcGains> find_smc(const BenchmarkCase& bench, bool smooth) {
  std::vector<ControllerConfig> all{bench.default_controller};
  all.insert(all.end(), bench.baselines.begin(), bench.baselines.end());
  for (const auto& c : all) {
    if (const auto* g = std::get_if<SmcGains>(&c)) {
      if ((g->switching != Switching::Sign) == smooth) return *g;
    }
  }
  return std::nullopt;
}

}  // namespace

ControllerConfig make_controller(const BenchmarkCase& bench,
                                 const std::string& name,
                                 const ParamMap& p) {
  const int m = bench.problem.dim_h;
  if (name == "smc" || name == "smc_smooth") {
    const bool smooth = name == "smc_smooth";
    check_params(p,
                 smooth ? std::vector<std::string>{"K", "eps", "alpha",
                                                   "gram_reg", "fraction"}
                        : std::vector<std::string>{"K", "alpha", "gram_reg"},
                 name);
    SmcGains g;
    if (auto own = find_smc(bench, smooth)) {
      g = *own;
    } else if (auto other = find_smc(bench, !smooth)) {
      g = *other;
      g.switching = smooth ? Switching::Saturation : Switching::Sign;
      if (smooth && !(g.eps > 0.0)) g.eps = 1e-2;
    } else {
      g = SmcGains::uniform(m, 5.0, smooth ? Switching::Saturation
                                           : Switching::Sign,
                            smooth ? 1e-2 : 0.0);
    }
    if (p.count("K")) g.K = Vec::Constant(m, p.at("K"));
    g.eps = param_or(p, "eps", g.eps);
    g.linear_gain = param_or(p, "alpha", g.linear_gain);
    g.gram_reg = param_or(p, "gram_reg", g.gram_reg);
    if (p.count("fraction")) {
      g.switching = p.at("fraction") != 0.0 ? Switching::Fraction
                                            : Switching::Saturation;
    }
    g.validate();
    return g;
  }
  if (name == "sta") {
    check_params(p, {"K1", "K2", "gram_reg"}, name);
    const StaGains base = find_config<StaGains>(bench).value_or(StaGains{});
    const double k1 = param_or(p, "K1", base.K1 > 0.0 ? base.K1 : 10.0);
    const double k2 = param_or(p, "K2", base.K2 > 0.0 ? base.K2 : 20.0);
    return StaGains(k1, k2, param_or(p, "gram_reg", base.gram_reg));
  }
  if (name == "ntsmc") {
    check_params(p, {"K1", "K2", "beta", "gamma", "rho", "eta", "p",
                     "gram_reg"},
                 name);
    NtsmConfig c = find_config<NtsmConfig>(bench).value_or(
        NtsmConfig::uniform(m, 5.0, 3.0));
    if (p.count("K1")) c.K1 = Vec::Constant(m, p.at("K1"));
    if (p.count("K2")) c.K2 = Vec::Constant(m, p.at("K2"));
    c.beta = param_or(p, "beta", c.beta);
    c.gamma = param_or(p, "gamma", c.gamma);
    c.rho = param_or(p, "rho", c.rho);
    c.eta = param_or(p, "eta", c.eta);
    c.p = param_or(p, "p", c.p);
    c.gram_reg = param_or(p, "gram_reg", c.gram_reg);
    c.validate();
    return c;
  }
  if (name == "pdgd") {
    check_params(p, {"primal", "dual"}, name);
    PdgdGains g = find_config<PdgdGains>(bench).value_or(PdgdGains{});
    g.primal = param_or(p, "primal", g.primal);
    g.dual = param_or(p, "dual", g.dual);
    return g;
  }
  if (name == "pi_cmo") {
    check_params(p, {"Kp", "Ki"}, name);
    PiCmoGains g = find_config<PiCmoGains>(bench).value_or(PiCmoGains{});
    g.Kp = param_or(p, "Kp", g.Kp);
    g.Ki = param_or(p, "Ki", g.Ki);
    return g;
  }
  if (name == "pgf") {
    check_params(p, {"gram_reg"}, name);
    PgfConfig c = find_config<PgfConfig>(bench).value_or(PgfConfig{});
    c.gram_reg = param_or(p, "gram_reg", c.gram_reg);
    return c;
  }
  if (name == "apf") {
    check_params(p, {"k_att", "k_rep", "d0"}, name);
    auto c = find_config<ApfConfig>(bench);
    if (!c) {
      throw ConfigError("controller 'apf' needs obstacle data; benchmark '" +
                        bench.name + "' has none");
    }
    c->gains.k_att = param_or(p, "k_att", c->gains.k_att);
    c->gains.k_rep = param_or(p, "k_rep", c->gains.k_rep);
    c->gains.d0 = param_or(p, "d0", c->gains.d0);
    return *c;
  }
  throw ConfigError("unknown controller '" + name + "' (valid: " +
                    join(controller_names()) + ")");
}

DisturbanceSpec make_disturbance(const BenchmarkCase& bench,
                                 const std::string& spec,
                                 const ParamMap& params, const Vec& x0,
                                 double dt, std::uint64_t seed) {
  check_params(params,
               {"matched_eta_bar", "noise_delta", "noise_hold",
                "structured_amplitude", "structured_omega", "structured_floor",
                "additive_amplitude", "additive_omega"},
               "disturbance");
  const Problem& prob = bench.problem;
  const int m = prob.dim_h;
  const int n = prob.dim_x;
  DisturbanceSpec d;
  for (const auto& part : split(spec, '+')) {
    if (part == "default") {
      const DisturbanceSpec& own = bench.disturbance;
      if (own.matched) d.matched = own.matched;
      if (own.structured) d.structured = own.structured;
      if (own.noise) d.noise = own.noise;
      if (own.additive) d.additive = own.additive;
    } else if (part == "none") {
      d = DisturbanceSpec{};
    } else if (part == "matched") {
      if (bench.disturbance.matched && !params.count("matched_eta_bar")) {
        d.matched = bench.disturbance.matched;
      } else {
        d.matched =
            multisine_matched(m, param_or(params, "matched_eta_bar", 0.25),
                              seed);
      }
    } else if (part == "noise") {
      d.noise = uniform_noise(m, param_or(params, "noise_delta", 0.05), seed,
                              param_or(params, "noise_hold", dt));
    } else if (part == "structured") {
      const Mat pattern =
          Mat::Ones(m, n) / std::sqrt(static_cast<double>(m * n));
      const double floor = param_or(params, "structured_floor", 0.25) *
                           sigma_min_gram(prob.jac(x0));
      d.structured = sinusoidal_jacobian_error(
          pattern, param_or(params, "structured_amplitude", 0.1),
          param_or(params, "structured_omega", 2.0), floor);
    } else if (part == "additive") {
      d.additive =
          sinusoidal_additive(n, param_or(params, "additive_amplitude", 0.1),
                              param_or(params, "additive_omega", 2.0 * M_PI));
    } else {
      throw ConfigError("unknown disturbance '" + part + "' (valid: " +
                        join(disturbance_names()) + ")");
    }
  }
  return d;
}

// --- execution -----------------------------------------------------------

std::string to_string(Feasibility f) {
  switch (f) {
    case Feasibility::Finite:
      return "finite";
    case Feasibility::Asymptotic:
      return "asymptotic";
    case Feasibility::Failed:
      return "failed";
  }
  return "failed";
}

namespace {

double reaching_bound(const Problem& prob, const ControllerConfig& ctl,
                      const DisturbanceSpec& d, const Vec& x0,
                      const Trajectory& traj) {
  const Vec h0 = prob.h(x0);
  if (const auto* g = std::get_if<SmcGains>(&ctl)) {
    if (d.eta_bar() > 0.0) {
      return matched_reach_bound(h0, *g, prob.jac(x0), d.eta_bar())
          .value_or(std::numeric_limits<double>::infinity());
    }
    return smc_reach_bound(h0, *g);
  }
  if (const auto* c = std::get_if<NtsmConfig>(&ctl)) {
    if (traj.empty()) return kNaN;
    return ntsm_time_bounds(traj.sliding.front(), h0, 0.0, *c, 0.0, 0.0)
        .constraint_total();
  }
  return kNaN;
}

RunResult run_one(const RunConfig& cfg, const BenchmarkCase& bench,
                  const std::string& controller, std::uint64_t seed) {
  RunResult r;
  r.controller = controller;
  r.seed = seed;
  for (const char* k :
       {"reaching_time", "reached", "reaching_time_bound", "bound_satisfied",
        "max_violation_after_reach", "chattering_amplitude", "final_violation",
        "final_distance", "final_objective", "diverged"}) {
    r.metrics[k] = kNaN;
  }
  try {
    IntegratorConfig ic = bench.integrator;
    if (cfg.method) ic.method = *cfg.method;
    if (cfg.dt) ic.dt = *cfg.dt;
    if (cfg.t_final) ic.t_final = *cfg.t_final;
    if (cfg.record_stride) ic.record_stride = *cfg.record_stride;
    const auto it = cfg.controller_params.find(controller);
    const ControllerConfig ctl = make_controller(
        bench, controller, it == cfg.controller_params.end() ? ParamMap{}
                                                             : it->second);
    const Vec x0 = bench.x0(seed);
    const DisturbanceSpec dist = make_disturbance(
        bench, cfg.disturbance, cfg.disturbance_params, x0, ic.dt, seed);
    r.trajectory = simulate(bench.problem, ctl, dist, x0, bench.lambda0, ic);

    std::optional<Vec> target = bench.target;
    if (!target && bench.optimum) target = bench.optimum->x_star;
    const double bound =
        reaching_bound(bench.problem, ctl, dist, x0, r.trajectory);
    r.report = summarize(r.trajectory, bound, cfg.tol, cfg.dwell, target);

    const Trajectory& tr = r.trajectory;
    auto& mt = r.metrics;
    mt["reaching_time"] = r.report.reaching_time_empirical.value_or(kNaN);
    mt["reached"] = r.report.reaching_time_empirical ? 1.0 : 0.0;
    mt["reaching_time_bound"] = bound;
    mt["bound_satisfied"] = r.report.bound_satisfied ? 1.0 : 0.0;
    mt["max_violation_after_reach"] = r.report.max_violation_after_reach;
    mt["chattering_amplitude"] = r.report.chattering_amplitude;
    mt["final_violation"] = tr.violations.back().lpNorm<Eigen::Infinity>();
    mt["final_distance"] = r.report.final_distance_to_optimum.value_or(kNaN);
    mt["final_objective"] = bench.problem.phi(tr.final_state());
    mt["diverged"] = tr.diverged ? 1.0 : 0.0;

    const double h_start = tr.violations.front().lpNorm<Eigen::Infinity>();
    if (tr.diverged) {
      r.feasibility = Feasibility::Failed;
    } else if (r.report.reaching_time_empirical) {
      r.feasibility = Feasibility::Finite;
    } else if (mt["final_violation"] <= std::max(10.0 * cfg.tol, 0.1 * h_start)) {
      r.feasibility = Feasibility::Asymptotic;
    } else {
      r.feasibility = Feasibility::Failed;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.error = e.what();
    r.feasibility = Feasibility::Failed;
    r.metrics["diverged"] = 1.0;
    r.metrics["reached"] = 0.0;
    r.metrics["bound_satisfied"] = 0.0;
  }
  return r;
}

}  // namespace

bool RunOutcome::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ExpectationCheck& c) { return c.passed; });
}

RunOutcome execute(const RunConfig& cfg) {
  cfg.validate();
  BenchmarkCase bench;
  try {
    bench = make_benchmark(cfg.benchmark, cfg.benchmark_params);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  RunOutcome out;
  out.controllers = cfg.controllers;
  if (out.controllers.empty()) {
    out.controllers.push_back(controller_name(bench.default_controller));
  }
  // Surface bad names or parameters before any worker starts.
  for (const auto& c : out.controllers) {
    const auto it = cfg.controller_params.find(c);
    make_controller(bench, c,
                    it == cfg.controller_params.end() ? ParamMap{} : it->second);
  }
  make_disturbance(bench, cfg.disturbance, cfg.disturbance_params,
                   bench.x0(cfg.seeds.front()), cfg.dt.value_or(bench.integrator.dt),
                   cfg.seeds.front());

  struct Job {
    std::string controller;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& c : out.controllers) {
    for (auto s : cfg.seeds) jobs.push_back({c, s});
  }
  out.runs.resize(jobs.size());

  unsigned workers = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                                  : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out.runs[i] = run_one(cfg, bench, jobs[i].controller, jobs[i].seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  out.table = ComparisonTable::build(out.runs, out.controllers);
  for (const auto& run : out.runs) {
    if (const auto it = cfg.controller_params.find(run.controller);
        it != cfg.controller_params.end() && !it->second.empty()) {
      continue;
    }
    for (const auto& [key, exp] : bench.expected) {
      const auto dot = key.find('.');
      if (key.substr(0, dot) != run.controller) continue;
      const std::string metric = key.substr(dot + 1);
      const auto it = run.metrics.find(metric);
      ExpectationCheck c;
      c.key = key;
      c.seed = run.seed;
      c.expected = exp;
      c.measured = it == run.metrics.end() ? kNaN : it->second;
      c.passed = run.error.empty() && exp.holds(c.measured);
      out.checks.push_back(c);
    }
  }
  return out;
}

ComparisonTable ComparisonTable::build(
    const std::vector<RunResult>& runs,
    const std::vector<std::string>& controllers) {
  ComparisonTable t;
  for (const auto& name : controllers) {
    ComparisonRow row;
    row.controller = name;
    row.feasibility = Feasibility::Finite;
    row.bound_satisfied = true;
    bool all_reached = true;
    double worst = 0.0;
    double objective = 0.0;
    int count = 0;
    for (const auto& r : runs) {
      if (r.controller != name) continue;
      ++count;
      if (static_cast<int>(r.feasibility) > static_cast<int>(row.feasibility)) {
        row.feasibility = r.feasibility;
      }
      row.bound_satisfied = row.bound_satisfied && r.report.bound_satisfied &&
                            r.error.empty();
      if (r.report.reaching_time_empirical) {
        worst = std::max(worst, *r.report.reaching_time_empirical);
      } else {
        all_reached = false;
      }
      objective += r.metrics.at("final_objective");
    }
    if (count == 0) {
      row.feasibility = Feasibility::Failed;
      row.bound_satisfied = false;
      all_reached = false;
    }
    if (all_reached) row.reaching_time = worst;
    row.final_objective = count > 0 ? objective / count : kNaN;
    t.rows.push_back(row);
  }
  return t;
}

void ComparisonTable::write_csv(std::ostream& os) const {
  os << "controller,reaching_time,feasibility,final_objective,bound_satisfied\n";
  for (const auto& r : rows) {
    os << r.controller << ','
       << (r.reaching_time ? format_number(*r.reaching_time) : "") << ','
       << to_string(r.feasibility) << ',' << format_number(r.final_objective)
       << ',' << (r.bound_satisfied ? "true" : "false") << '\n';
  }
}

void ComparisonTable::print(std::ostream& os) const {
  os << std::left << std::setw(12) << "controller" << std::setw(16)
     << "reaching_time" << std::setw(13) << "feasibility" << std::setw(18)
     << "final_objective"
     << "bound_satisfied\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(12) << r.controller << std::setw(16)
       << (r.reaching_time ? format_number(*r.reaching_time) : "-")
       << std::setw(13) << to_string(r.feasibility) << std::setw(18)
       << format_number(r.final_objective)
       << (r.bound_satisfied ? "yes" : "no") << '\n';
  }
}

void write_report(const RunConfig& cfg, const RunOutcome& outcome,
                  std::ostream& os) {
  os << "[run]\n";
  os << "benchmark = " << cfg.benchmark << '\n';
  for (const auto& [k, v] : cfg.benchmark_params) {
    os << "benchmark." << k << " = " << format_number(v) << '\n';
  }
  os << "controllers = " << join(outcome.controllers) << '\n';
  os << "disturbance = " << cfg.disturbance << '\n';
  os << "tol = " << format_number(cfg.tol) << '\n';
  os << "dwell = " << format_number(cfg.dwell) << '\n';
  for (const auto& r : outcome.runs) {
    os << "\n[" << r.controller << " seed=" << r.seed << "]\n";
    if (!r.error.empty()) os << "error = " << r.error << '\n';
    os << "feasibility = " << to_string(r.feasibility) << '\n';
    for (const auto& [k, v] : r.metrics) {
      os << k << " = " << format_number(v) << '\n';
    }
  }
  if (!outcome.checks.empty()) {
    os << "\n[expectations]\n";
    for (const auto& c : outcome.checks) {
      const char* kind = c.expected.kind == Expectation::Kind::Near ? "near"
                         : c.expected.kind == Expectation::Kind::AtMost
                             ? "at_most"
                             : "at_least";
      os << c.key << " seed=" << c.seed << " measured=" << format_number(c.measured)
         << " expected=" << kind << ' ' << format_number(c.expected.value);
      if (c.expected.kind == Expectation::Kind::Near) {
        os << " +- " << format_number(c.expected.tol);
      }
      os << ' ' << (c.passed ? "PASS" : "FAIL") << '\n';
    }
  }
  os << "\n[comparison]\n";
  outcome.table.print(os);
}

// --- commands ------------------------------------------------------------

namespace {

void write_outputs(const RunConfig& cfg, const RunOutcome& outcome,
                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::filesystem::filesystem_error("cannot create output directory",
                                            dir, ec);
  }
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) {
      throw std::filesystem::filesystem_error(
          "cannot write", p, std::make_error_code(std::errc::io_error));
    }
    return f;
  };
  for (const auto& r : outcome.runs) {
    if (r.trajectory.empty()) continue;
    auto f = open(dir / (cfg.benchmark + "_" + r.controller + "_seed" +
                         std::to_string(r.seed) + ".csv"));
    write_csv(r.trajectory, f);
  }
  {
    auto f = open(dir / "report.txt");
    write_report(cfg, outcome, f);
  }
  if (outcome.controllers.size() > 1) {
    auto f = open(dir / "comparison.csv");
    outcome.table.write_csv(f);
  }
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& log) {
  RunOutcome outcome;
  try {
    outcome = execute(cfg);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    write_outputs(cfg, outcome, cfg.output_dir);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }
  for (const auto& r : outcome.runs) {
    if (!r.error.empty()) {
      log << "warning: " << r.controller << " seed " << r.seed
          << " stopped: " << r.error << '\n';
    } else if (r.trajectory.diverged) {
      log << "warning: " << r.controller << " seed " << r.seed
          << " diverged at t = " << format_number(*r.trajectory.divergence_time)
          << '\n';
    }
  }
  outcome.table.print(log);
  for (const auto& c : outcome.checks) {
    if (!c.passed) {
      log << "expectation failed: " << c.key << " (seed " << c.seed
          << ", measured " << format_number(c.measured) << ")\n";
    }
  }
  log << "report written to " << (std::filesystem::path(cfg.output_dir) /
                                  "report.txt").string()
      << '\n';
  return outcome.all_passed() ? kExitOk : kExitExpectationFailed;
}

int sweep_command(const RunConfig& cfg, const std::string& axis,
                  const std::vector<std::string>& values, std::ostream& log) {
  if (values.empty()) {
    log << "error: sweep needs at least one value\n";
    return kExitUsage;
  }
  std::vector<std::pair<std::string, RunOutcome>> results;
  try {
    for (const auto& v : values) {
      parse_double(v, axis);
      RunConfig sub = cfg;
      set_config_value(sub, axis, v);
      sub.output_dir =
          (std::filesystem::path(cfg.output_dir) / (axis + "=" + v)).string();
      results.emplace_back(v, execute(sub));
      write_outputs(sub, results.back().second, sub.output_dir);
    }
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }

  static const std::vector<std::string> columns{
      "reaching_time",        "reaching_time_bound",
      "bound_satisfied",      "chattering_amplitude",
      "max_violation_after_reach", "final_violation",
      "final_distance",       "final_objective",
      "diverged"};
  const auto path = std::filesystem::path(cfg.output_dir) / "sweep.csv";
  std::ofstream f(path);
  if (!f) {
    log << "error: cannot write " << path.string() << '\n';
    return kExitIo;
  }
  f << axis << ",controller,seed";
  for (const auto& c : columns) f << ',' << c;
  f << '\n';
  bool ok = true;
  for (const auto& [value, outcome] : results) {
    ok = ok && outcome.all_passed();
    for (const auto& r : outcome.runs) {
      f << value << ',' << r.controller << ',' << r.seed;
      for (const auto& c : columns) f << ',' << format_number(r.metrics.at(c));
      f << '\n';
    }
  }
  log << "sweep over " << axis << " written to " << path.string() << '\n';
  return ok ? kExitOk : kExitExpectationFailed;
}

int list_command(std::ostream& os) {
  os << "benchmarks:\n";
  for (const auto& b : benchmark_names()) {
    os << "  " << b;
    const auto params = benchmark_params(b);
    if (!params.empty()) os << " (" << join(params) << ")";
    os << '\n';
  }
  os << "controllers:\n";
  for (const auto& c : controller_names()) os << "  " << c << '\n';
  os << "disturbances:\n";
  for (const auto& d : disturbance_names()) os << "  " << d << '\n';
  return kExitOk;
}

}  // namespace slideopt

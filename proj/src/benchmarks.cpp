#include "slideopt/benchmarks.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace slideopt {

bool Expectation::holds(double measured) const {
  if (!std::isfinite(measured)) return false;
  switch (kind) {
    case Kind::Near:
      return std::abs(measured - value) <= tol;
    case Kind::AtMost:
      return measured <= value + tol;
    case Kind::AtLeast:
      return measured >= value - tol;
  }
  return false;
}

namespace {

Expectation near(double v, double tol) {
  return {v, tol, Expectation::Kind::Near};
}
Expectation at_most(double v) { return {v, 0.0, Expectation::Kind::AtMost}; }
Expectation at_least(double v) {
  return {v, 0.0, Expectation::Kind::AtLeast};
}

std::function<Vec(std::uint64_t)> fixed_x0(Vec x0) {
  return [x0](std::uint64_t) { return x0; };
}

}  // namespace

BenchmarkCase example1(double w, double K, double x0) {
  if (!(w > 0.0) || !(K > 0.0)) {
    throw std::invalid_argument("example1: w and K must be positive");
  }
  BenchmarkCase c;
  c.name = "example1";
  Problem& p = c.problem;
  p.name = c.name;
  p.dim_x = 1;
  p.dim_h = 1;
  p.objective = [w](const Vec& x) { return 0.5 * w * x(0) * x(0); };
  p.gradient = [w](const Vec& x) { return Vec(w * x); };
  p.constraints = [](const Vec& x) { return x; };
  p.jacobian = [](const Vec&) { return Mat::Identity(1, 1); };
  p.hessian_phi = [w](const Vec&) { return Mat::Constant(1, 1, w); };
  p.strong_convexity = w;
  p.linear_constraints = true;

  c.default_controller = SmcGains::uniform(1, K);
  c.baselines = {PdgdGains{}, PiCmoGains{}};
  c.integrator.dt = 1e-4 / std::max(1.0, K);
  c.integrator.t_final = std::abs(x0) / K + 1.0;
  c.x0_rule = fixed_x0(Vec::Constant(1, x0));
  c.lambda0 = Vec::Zero(1);
  c.optimum = KktPoint::evaluate(p, Vec::Zero(1), Vec::Zero(1));
  c.expected["smc.reaching_time"] =
      near(std::max(std::abs(x0) - c.tol, 0.0) / K, 2e-3);
  c.expected["smc.bound_satisfied"] = at_least(1.0);
  return c;
}

BenchmarkCase nonconvex_qp(double K) {
  if (!(K > 0.0)) throw std::invalid_argument("nonconvex_qp: K <= 0");
  BenchmarkCase c;
  c.name = "nonconvex_qp";
  Problem& p = c.problem;
  p.name = c.name;
  p.dim_x = 2;
  p.dim_h = 1;
  const Eigen::Vector2d w(1.0, -1.0);
  Mat C(1, 2);
  C << 0.0, 2.0;
  p.objective = [w](const Vec& x) {
    return 0.5 * (w.array() * x.array().square()).sum();
  };
  p.gradient = [w](const Vec& x) { return Vec(w.cwiseProduct(x)); };
  p.constraints = [C](const Vec& x) { return Vec(C * x); };
  p.jacobian = [C](const Vec&) { return C; };
  p.hessian_phi = [w](const Vec&) { return Mat(w.asDiagonal()); };
  p.linear_constraints = true;

  c.default_controller = SmcGains::uniform(1, K);
  c.baselines = {PdgdGains{}, PiCmoGains{}};
  c.disturbance.matched = sinusoidal_matched(Vec::Ones(1), 1.0, 1.0);
  c.integrator.dt = 2e-5;
  c.integrator.t_final = 10.0;
  c.x0_rule = fixed_x0(Eigen::Vector2d(1.0, 1.0));
  c.lambda0 = Vec::Zero(1);
  c.optimum = KktPoint::evaluate(p, Vec::Zero(2), Vec::Zero(1));
  c.expected["smc.reaching_time"] = at_most(1.0);
  c.expected["smc.bound_satisfied"] = at_least(1.0);
  c.expected["pdgd.reached"] = at_most(0.0);
  c.expected["pi_cmo.reached"] = at_most(0.0);
  return c;
}

BenchmarkCase obstacle_course(double K, double eta_max) {
  if (!(K > 0.0)) throw std::invalid_argument("obstacle_course: K <= 0");
  if (eta_max < 0.0) throw std::invalid_argument("obstacle_course: eta_max < 0");
  BenchmarkCase c;
  c.name = "obstacle_course";
  const Eigen::Vector2d goal(6.0, 0.0);
  const double radius = 0.8;
  const std::vector<Obstacle> obstacles{{Eigen::Vector2d(3.0, 1.0), radius},
                                        {Eigen::Vector2d(3.0, -1.0), radius}};
  Problem& p = c.problem;
  p.name = c.name;
  p.dim_x = 2;
  p.dim_h = 2;
  p.objective = [goal](const Vec& q) { return 0.5 * (q - goal).squaredNorm(); };
  p.gradient = [goal](const Vec& q) { return Vec(q - goal); };
  p.constraints = [obstacles](const Vec& q) {
    Vec h(2);
    for (int i = 0; i < 2; ++i) {
      h(i) = (q - obstacles[i].center).norm() - obstacles[i].radius;
    }
    return h;
  };
  p.jacobian = [obstacles](const Vec& q) {
    Mat j(2, 2);
    for (int i = 0; i < 2; ++i) {
      const Vec d = q - obstacles[i].center;
      j.row(i) = (d / d.norm()).transpose();
    }
    return j;
  };
  p.hessian_phi = [](const Vec&) { return Mat::Identity(2, 2); };
  p.hessian_h = [obstacles](const Vec& q) {
    std::vector<Mat> out;
    for (const auto& o : obstacles) {
      const Vec d = q - o.center;
      const double r = d.norm();
      out.push_back((Mat::Identity(2, 2) - d * d.transpose() / (r * r)) / r);
    }
    return out;
  };
  p.strong_convexity = 1.0;

  c.default_controller = SmcGains::uniform(2, K);
  ApfConfig apf;
  apf.goal = goal;
  apf.obstacles = obstacles;
  c.baselines = {PgfConfig{}, apf};
  if (eta_max > 0.0) {
    c.disturbance.matched = sinusoidal_matched(Vec::Ones(2), eta_max, 1.0);
  }
  c.integrator.dt = 1e-4;
  c.integrator.t_final = 10.0;
  c.x0_rule = fixed_x0(Vec::Zero(2));
  c.lambda0 = Vec::Zero(2);
  c.target = Vec(goal);
  c.expected["smc.reaching_time"] = near(0.41, 0.1025);
  c.expected["smc.final_distance"] = at_most(0.1);
  c.expected["apf.final_distance"] = at_least(1.0);
  return c;
}

// --- Shidoku -----------------------------------------------------------------

const std::vector<std::array<int, 3>>& shidoku_clues() {
  static const std::vector<std::array<int, 3>> clues{
      {0, 1, 1}, {0, 3, 4}, {2, 0, 2}, {2, 3, 3}};
  return clues;
}

const std::vector<std::pair<int, int>>& shidoku_free_cells() {
  static const std::vector<std::pair<int, int>> cells = [] {
    std::vector<std::pair<int, int>> out;
    for (int r = 0; r < 4; ++r) {
      for (int col = 0; col < 4; ++col) {
        const bool clue =
            std::any_of(shidoku_clues().begin(), shidoku_clues().end(),
                        [&](const auto& k) { return k[0] == r && k[1] == col; });
        if (!clue) out.emplace_back(r, col);
      }
    }
    return out;
  }();
  return cells;
}

namespace {

using Cell = std::pair<int, int>;

// Rows, then columns, then 2x2 blocks.
const std::vector<std::array<Cell, 4>>& shidoku_groups() {
  static const std::vector<std::array<Cell, 4>> groups = [] {
    std::vector<std::array<Cell, 4>> out;
    for (int r = 0; r < 4; ++r) {
      out.push_back({Cell{r, 0}, Cell{r, 1}, Cell{r, 2}, Cell{r, 3}});
    }
    for (int col = 0; col < 4; ++col) {
      out.push_back({Cell{0, col}, Cell{1, col}, Cell{2, col}, Cell{3, col}});
    }
    for (int br = 0; br < 4; br += 2) {
      for (int bc = 0; bc < 4; bc += 2) {
        out.push_back({Cell{br, bc}, Cell{br, bc + 1}, Cell{br + 1, bc},
                       Cell{br + 1, bc + 1}});
      }
    }
    return out;
  }();
  return groups;
}

// Cell value (clue or state entry) and state index (-1 for clues).
struct CellMap {
  std::array<std::array<int, 4>, 4> index{};
  std::array<std::array<double, 4>, 4> clue{};

  CellMap() {
    for (auto& row : index) row.fill(-1);
    for (const auto& k : shidoku_clues()) clue[k[0]][k[1]] = k[2];
    const auto& cells = shidoku_free_cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      index[cells[i].first][cells[i].second] = static_cast<int>(i);
    }
  }
  double value(const Vec& x, const Cell& c) const {
    const int i = index[c.first][c.second];
    return i >= 0 ? x(i) : clue[c.first][c.second];
  }
};

const CellMap& cell_map() {
  static const CellMap map;
  return map;
}

bool complete(ShidokuGrid& g, int pos) {
  if (pos == 16) return shidoku_valid(g);
  const int r = pos / 4;
  const int col = pos % 4;
  if (g[r][col] != 0) return complete(g, pos + 1);
  for (int v = 1; v <= 4; ++v) {
    bool ok = true;
    for (int k = 0; k < 4; ++k) {
      if (g[r][k] == v || g[k][col] == v) ok = false;
    }
    const int br = r / 2 * 2;
    const int bc = col / 2 * 2;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (g[br + a][bc + b] == v) ok = false;
      }
    }
    if (!ok) continue;
    g[r][col] = v;
    if (complete(g, pos + 1)) return true;
    g[r][col] = 0;
  }
  return false;
}

}  // namespace

ShidokuGrid shidoku_grid(const Vec& x) {
  const auto& cells = shidoku_free_cells();
  if (x.size() != static_cast<Eigen::Index>(cells.size())) {
    throw DimensionError("shidoku_grid: expected 12 free values");
  }
  ShidokuGrid g{};
  for (const auto& k : shidoku_clues()) g[k[0]][k[1]] = k[2];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    g[cells[i].first][cells[i].second] =
        static_cast<int>(std::lround(x(static_cast<Eigen::Index>(i))));
  }
  return g;
}

bool shidoku_valid(const ShidokuGrid& grid) {
  for (const auto& k : shidoku_clues()) {
    if (grid[k[0]][k[1]] != k[2]) return false;
  }
  for (const auto& group : shidoku_groups()) {
    std::array<bool, 5> seen{};
    for (const auto& [r, col] : group) {
      const int v = grid[r][col];
      if (v < 1 || v > 4 || seen[v]) return false;
      seen[v] = true;
    }
  }
  return true;
}

Vec shidoku_solution() {
  ShidokuGrid g{};
  for (const auto& k : shidoku_clues()) g[k[0]][k[1]] = k[2];
  if (!complete(g, 0)) throw std::logic_error("shidoku: clues admit no grid");
  const auto& cells = shidoku_free_cells();
  Vec x(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    x(static_cast<Eigen::Index>(i)) = g[cells[i].first][cells[i].second];
  }
  return x;
}

BenchmarkCase shidoku(double K, double alpha, double eps, double mu_reg,
                      std::uint64_t seed) {
  if (!(mu_reg > 0.0)) {
    throw std::invalid_argument(
        "shidoku: the constraint Jacobian is row-rank deficient; mu_reg must "
        "be positive");
  }
  BenchmarkCase c;
  c.name = "shidoku";
  const int n = static_cast<int>(shidoku_free_cells().size());
  const int groups = static_cast<int>(shidoku_groups().size());
  const int m = n + 2 * groups;
  Problem& p = c.problem;
  p.name = c.name;
  p.dim_x = n;
  p.dim_h = m;
  p.objective = [](const Vec&) { return 0.0; };
  p.gradient = [n](const Vec&) { return Vec::Zero(n); };
  p.hessian_phi = [n](const Vec&) { return Mat::Zero(n, n); };
  p.constraints = [n, m](const Vec& x) {
    const CellMap& map = cell_map();
    Vec h(m);
    for (int i = 0; i < n; ++i) {
      h(i) = (x(i) - 1.0) * (x(i) - 2.0) * (x(i) - 3.0) * (x(i) - 4.0);
    }
    int row = n;
    for (const auto& group : shidoku_groups()) {
      double sum = 0.0;
      double prod = 1.0;
      for (const auto& cell : group) {
        const double v = map.value(x, cell);
        sum += v;
        prod *= v;
      }
      h(row++) = sum - 10.0;
      h(row++) = prod - 24.0;
    }
    return h;
  };
  p.jacobian = [n, m](const Vec& x) {
    const CellMap& map = cell_map();
    Mat j = Mat::Zero(m, n);
    for (int i = 0; i < n; ++i) {
      const double f[4] = {x(i) - 1.0, x(i) - 2.0, x(i) - 3.0, x(i) - 4.0};
      j(i, i) = f[1] * f[2] * f[3] + f[0] * f[2] * f[3] + f[0] * f[1] * f[3] +
                f[0] * f[1] * f[2];
    }
    int row = n;
    for (const auto& group : shidoku_groups()) {
      for (std::size_t a = 0; a < group.size(); ++a) {
        const int idx = map.index[group[a].first][group[a].second];
        if (idx < 0) continue;
        double others = 1.0;
        for (std::size_t b = 0; b < group.size(); ++b) {
          if (b != a) others *= map.value(x, group[b]);
        }
        j(row, idx) = 1.0;
        j(row + 1, idx) = others;
      }
      row += 2;
    }
    return j;
  };

  SmcGains g = SmcGains::uniform(m, K, Switching::Fraction, eps);
  g.linear_gain = alpha;
  g.gram_reg = mu_reg;
  c.default_controller = g;
  c.integrator.dt = 1e-4;
  c.integrator.t_final = 15.0;
  c.x0_rule = [n, seed](std::uint64_t s) {
    std::mt19937_64 rng(seed + s);
    std::uniform_real_distribution<double> u(1.0, 4.0);
    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = u(rng);
    return x;
  };
  c.lambda0 = Vec::Zero(m);
  c.optimum = KktPoint::evaluate(p, shidoku_solution(), Vec::Zero(m));
  c.expected["smc_smooth.final_violation"] = at_most(2.6e-4);
  return c;
}

// --- consensus estimation ----------------------------------------------------

Topology parse_topology(const std::string& name) {
  if (name == "ring") return Topology::Ring;
  if (name == "path") return Topology::Path;
  if (name == "complete") return Topology::Complete;
  throw std::invalid_argument("unknown topology '" + name +
                              "' (expected ring, path or complete)");
}

Mat graph_laplacian(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw std::invalid_argument("graph_laplacian: n < 1");
  Mat L = Mat::Zero(n, n);
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
      throw std::invalid_argument("graph_laplacian: invalid edge");
    }
    if (L(a, b) != 0.0) continue;
    L(a, b) = L(b, a) = -1.0;
    L(a, a) += 1.0;
    L(b, b) += 1.0;
  }
  return L;
}

Mat graph_laplacian(int n, Topology topology) {
  std::vector<std::pair<int, int>> edges;
  switch (topology) {
    case Topology::Ring:
      for (int i = 0; i < n; ++i) {
        if (n > 1 && (i + 1) % n != i) edges.emplace_back(i, (i + 1) % n);
      }
      break;
    case Topology::Path:
      for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case Topology::Complete:
      for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) edges.emplace_back(i, k);
      }
      break;
  }
  return graph_laplacian(n, edges);
}

bool laplacian_connected(const Mat& L) {
  Eigen::SelfAdjointEigenSolver<Mat> es(L, Eigen::EigenvaluesOnly);
  int zeros = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i)) < 1e-9) ++zeros;
  }
  return zeros == 1;
}

NtsmConfig consensus_ntsm_config(int m) {
  NtsmConfig cfg = NtsmConfig::uniform(m, 5.0, 3.0);
  cfg.beta = 2.0;
  cfg.gamma = 1.5;
  cfg.rho = 0.7;
  cfg.eta = 0.5;
  cfg.p = 0.5;
  return cfg;
}

BenchmarkCase consensus_estimation(int N, int n, Topology topology,
                                   std::uint64_t seed,
                                   std::optional<NtsmConfig> cfg) {
  if (N < 2) throw std::invalid_argument("consensus_estimation: N < 2");
  return consensus_estimation(graph_laplacian(N, topology), n, seed,
                              std::move(cfg));
}

BenchmarkCase consensus_estimation(const Mat& laplacian, int n,
                                   std::uint64_t seed,
                                   std::optional<NtsmConfig> cfg) {
  const int N = static_cast<int>(laplacian.rows());
  if (N < 2 || laplacian.cols() != N) {
    throw std::invalid_argument("consensus_estimation: bad Laplacian shape");
  }
  if (n < 1) throw std::invalid_argument("consensus_estimation: n < 1");
  if (!laplacian_connected(laplacian)) {
    throw std::invalid_argument(
        "consensus_estimation: communication graph is disconnected");
  }
  constexpr int kMeasurements = 10;
  constexpr double kNoise = 0.01;

  ConsensusInfo info;
  info.agents = N;
  info.dim = n;
  info.laplacian = laplacian;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  info.theta_true = Vec(n);
  for (int k = 0; k < n; ++k) info.theta_true(k) = normal(rng);
  Mat info_sum = Mat::Zero(n, n);
  Vec rhs_sum = Vec::Zero(n);
  double mu = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    Mat H(kMeasurements, n);
    for (int r = 0; r < kMeasurements; ++r) {
      for (int k = 0; k < n; ++k) H(r, k) = normal(rng);
    }
    Vec y = H * info.theta_true;
    for (int r = 0; r < kMeasurements; ++r) y(r) += kNoise * normal(rng);
    const Mat hth = H.transpose() * H;
    Eigen::SelfAdjointEigenSolver<Mat> es(hth, Eigen::EigenvaluesOnly);
    mu = std::min(mu, es.eigenvalues()(0));
    info_sum += hth;
    rhs_sum += H.transpose() * y;
    info.H.push_back(std::move(H));
    info.y.push_back(std::move(y));
  }
  info.theta_star = info_sum.ldlt().solve(rhs_sum);

  const int dim_x = N * n;
  // The rows of the last agent are a linear combination of the others; the
  // remaining (N - 1) n rows have full rank and the same zero set.
  const int m = (N - 1) * n;
  Mat A = Mat::Zero(m, dim_x);
  for (int i = 0; i < N - 1; ++i) {
    for (int k = 0; k < N; ++k) {
      A.block(i * n, k * n, n, n) = laplacian(i, k) * Mat::Identity(n, n);
    }
  }

  BenchmarkCase c;
  c.name = "consensus";
  Problem& p = c.problem;
  p.name = c.name;
  p.dim_x = dim_x;
  p.dim_h = m;
  const std::vector<Mat> Hs = info.H;
  const std::vector<Vec> ys = info.y;
  p.objective = [Hs, ys, n](const Vec& x) {
    double f = 0.0;
    for (std::size_t i = 0; i < Hs.size(); ++i) {
      const auto xi = x.segment(static_cast<Eigen::Index>(i) * n, n);
      f += 0.5 * (ys[i] - Hs[i] * xi).squaredNorm();
    }
    return f;
  };
  p.gradient = [Hs, ys, n, dim_x](const Vec& x) {
    Vec g(dim_x);
    for (std::size_t i = 0; i < Hs.size(); ++i) {
      const auto off = static_cast<Eigen::Index>(i) * n;
      g.segment(off, n) =
          -Hs[i].transpose() * (ys[i] - Hs[i] * x.segment(off, n));
    }
    return g;
  };
  p.hessian_phi = [Hs, n, dim_x](const Vec&) {
    Mat h = Mat::Zero(dim_x, dim_x);
    for (std::size_t i = 0; i < Hs.size(); ++i) {
      const auto off = static_cast<Eigen::Index>(i) * n;
      h.block(off, off, n, n) = Hs[i].transpose() * Hs[i];
    }
    return h;
  };
  p.constraints = [A](const Vec& x) { return Vec(A * x); };
  p.jacobian = [A](const Vec&) { return A; };
  p.linear_constraints = true;
  p.strong_convexity = mu;

  const Vec x_star = info.theta_star.replicate(N, 1);
  const Vec lam_star = multiplier_estimate(p, x_star);
  c.optimum = KktPoint::evaluate(p, x_star, lam_star);

  c.default_controller = cfg ? *cfg : consensus_ntsm_config(m);
  c.baselines = {PdgdGains{}};
  c.disturbance.additive = sinusoidal_additive(dim_x, 0.1, 2.0 * M_PI);
  c.integrator.dt = 1e-4;
  c.integrator.t_final = 5.5;
  c.x0_rule = [dim_x, seed](std::uint64_t s) {
    std::mt19937_64 rng(seed * 7919 + s + 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec x(dim_x);
    for (int i = 0; i < dim_x; ++i) x(i) = normal(rng);
    return x;
  };
  c.lambda0 = Vec::Zero(m);
  c.expected["ntsmc.final_distance"] =
      at_most(1e-2 * std::sqrt(static_cast<double>(N)));
  c.consensus = std::move(info);
  return c;
}

// --- registry ----------------------------------------------------------------

namespace {

struct Entry {
  std::string name;
  std::vector<std::pair<std::string, double>> params;
  std::function<BenchmarkCase(const ParamMap&)> build;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {"example1",
       {{"w", 1.0}, {"K", 1.0}, {"x0", 1.0}},
       [](const ParamMap& p) {
         return example1(p.at("w"), p.at("K"), p.at("x0"));
       }},
      {"nonconvex_qp",
       {{"K", 20.0}},
       [](const ParamMap& p) { return nonconvex_qp(p.at("K")); }},
      {"obstacle_course",
       {{"K", 20.0}, {"eta_max", 0.3}},
       [](const ParamMap& p) {
         return obstacle_course(p.at("K"), p.at("eta_max"));
       }},
      {"shidoku",
       {{"K", 5.0}, {"alpha", 0.1}, {"eps", 1e-3}, {"mu_reg", 1e-6},
        {"seed", 0.0}},
       [](const ParamMap& p) {
         return shidoku(p.at("K"), p.at("alpha"), p.at("eps"), p.at("mu_reg"),
                        static_cast<std::uint64_t>(p.at("seed")));
       }},
      {"consensus",
       {{"agents", 5.0}, {"dim", 3.0}, {"topology", 0.0}, {"seed", 0.0}},
       [](const ParamMap& p) {
         const int t = static_cast<int>(p.at("topology"));
         if (t < 0 || t > 2) {
           throw std::invalid_argument(
               "consensus: topology must be 0 (ring), 1 (path) or 2 "
               "(complete)");
         }
         return consensus_estimation(static_cast<int>(p.at("agents")),
                                     static_cast<int>(p.at("dim")),
                                     static_cast<Topology>(t),
                                     static_cast<std::uint64_t>(p.at("seed")));
       }},
  };
  return entries;
}

const Entry& find_entry(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.name == name) return e;
  }
  std::string valid;
  for (const auto& e : registry()) valid += (valid.empty() ? "" : ", ") + e.name;
  throw std::invalid_argument("unknown benchmark '" + name +
                              "' (valid: " + valid + ")");
}

}  // namespace

std::vector<std::string> benchmark_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.name);
  return out;
}

std::vector<std::string> benchmark_params(const std::string& name) {
  std::vector<std::string> out;
  for (const auto& [k, v] : find_entry(name).params) out.push_back(k);
  return out;
}

BenchmarkCase make_benchmark(const std::string& name, const ParamMap& params) {
  const Entry& e = find_entry(name);
  ParamMap merged;
  for (const auto& [k, v] : e.params) merged[k] = v;
  for (const auto& [k, v] : params) {
    if (!merged.count(k)) {
      throw std::invalid_argument("benchmark '" + name +
                                  "' has no parameter '" + k + "'");
    }
    merged[k] = v;
  }
  return e.build(merged);
}

}  // namespace slideopt

#include "slideopt/problem.hpp"

#include <Eigen/Eigenvalues>

#include <stdexcept>

namespace slideopt {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw DimensionError(msg);
}

}  // namespace

double Problem::phi(const Vec& x) const {
  check_x(x);
  return objective(x);
}

Vec Problem::grad(const Vec& x) const {
  check_x(x);
  if (gradient) return gradient(x);
  const auto f = [this](const Vec& v) {
    Vec out(1);
    out(0) = objective(v);
    return out;
  };
  return fd_jacobian(f, x, fd_step).row(0).transpose();
}

Vec Problem::h(const Vec& x) const {
  check_x(x);
  return constraints(x);
}

Mat Problem::jac(const Vec& x) const {
  check_x(x);
  if (jacobian) return jacobian(x);
  return fd_jacobian([this](const Vec& v) { return constraints(v); }, x,
                     fd_step);
}

Mat Problem::hess_phi(const Vec& x) const {
  check_x(x);
  if (hessian_phi) return hessian_phi(x);
  // Differences of the gradient; a second difference of phi loses too many
  // digits at the default step.
  const double step = gradient ? fd_step : 1e-4;
  Mat hs = fd_jacobian([this](const Vec& v) { return grad(v); }, x, step);
  return 0.5 * (hs + hs.transpose());
}

std::vector<Mat> Problem::hess_h(const Vec& x) const {
  check_x(x);
  if (hessian_h) return hessian_h(x);
  std::vector<Mat> out(static_cast<std::size_t>(dim_h),
                       Mat::Zero(dim_x, dim_x));
  if (linear_constraints) return out;
  const double step = jacobian ? fd_step : 1e-4;
  for (int i = 0; i < dim_h; ++i) {
    Mat hs = fd_jacobian(
        [this, i](const Vec& v) { return Vec(jac(v).row(i).transpose()); }, x,
        step);
    out[static_cast<std::size_t>(i)] = 0.5 * (hs + hs.transpose());
  }
  return out;
}

void Problem::check_x(const Vec& x) const {
  if (x.size() != dim_x) {
    throw DimensionError(name + ": dim(x) = " + std::to_string(x.size()) +
                         ", expected " + std::to_string(dim_x));
  }
}

void Problem::check_lambda(const Vec& lam) const {
  if (lam.size() != dim_h) {
    throw DimensionError(name + ": dim(lambda) = " +
                         std::to_string(lam.size()) + ", expected " +
                         std::to_string(dim_h));
  }
}

void Problem::validate(const Vec& x) const {
  require(dim_x > 0 && dim_h > 0, name + ": dimensions must be positive");
  require(static_cast<bool>(objective), name + ": objective missing");
  require(static_cast<bool>(constraints), name + ": constraints missing");
  check_x(x);
  require(grad(x).size() == dim_x, name + ": gradient dimension mismatch");
  require(h(x).size() == dim_h, name + ": constraint dimension mismatch");
  const Mat j = jac(x);
  require(j.rows() == dim_h && j.cols() == dim_x,
          name + ": Jacobian dimension mismatch");
  if (hessian_phi) {
    const Mat hp = hessian_phi(x);
    require(hp.rows() == dim_x && hp.cols() == dim_x,
            name + ": objective Hessian dimension mismatch");
  }
  if (hessian_h) {
    const auto hh = hessian_h(x);
    require(static_cast<int>(hh.size()) == dim_h,
            name + ": constraint Hessian count mismatch");
    for (const auto& m : hh) {
      require(m.rows() == dim_x && m.cols() == dim_x,
              name + ": constraint Hessian dimension mismatch");
    }
  }
}

KktPoint KktPoint::evaluate(const Problem& problem, const Vec& x,
                            const Vec& lam) {
  const auto r = fonc_residuals(problem, x, lam);
  return KktPoint{x, lam, r.stationarity, r.feasibility};
}

double lagrangian(const Problem& problem, const Vec& x, const Vec& lam) {
  problem.check_lambda(lam);
  return problem.phi(x) + lam.dot(problem.h(x));
}

FoncResiduals fonc_residuals(const Problem& problem, const Vec& x,
                             const Vec& lam) {
  problem.check_lambda(lam);
  const Vec stat = problem.grad(x) + problem.jac(x).transpose() * lam;
  return {stat.norm(), problem.h(x).norm()};
}

Mat lagrangian_hessian(const Problem& problem, const Vec& x, const Vec& lam) {
  problem.check_lambda(lam);
  Mat hl = problem.hess_phi(x);
  const auto hh = problem.hess_h(x);
  for (int i = 0; i < problem.dim_h; ++i) {
    hl += lam(i) * hh[static_cast<std::size_t>(i)];
  }
  return hl;
}

bool sonc_check(const Problem& problem, const Vec& x, const Vec& lam,
                double tol) {
  const Mat j = problem.jac(x);
  if (row_rank(j) < j.rows()) {
    throw RankDeficientError(problem.name +
                             ": Jacobian is row-rank deficient; tangent "
                             "space basis is ill-defined");
  }
  const Mat z = null_space(j);
  if (z.cols() == 0) return true;
  const Mat reduced = z.transpose() * lagrangian_hessian(problem, x, lam) * z;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (reduced + reduced.transpose()),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

Vec multiplier_estimate(const Problem& problem, const Vec& x, double reg) {
  const Mat j = problem.jac(x);
  return -gram_solve(j, Vec(j * problem.grad(x)), reg);
}

}  // namespace slideopt

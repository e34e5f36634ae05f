#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slideopt/numerics.hpp"

namespace slideopt {

/// One equality-constrained instance: min phi(x) subject to h(x) = 0.
///
/// Only objective and constraints are mandatory. Missing derivatives fall back
/// to central differences (gradient from objective, Jacobian from constraints,
/// Hessians from the first derivatives). Immutable once built; the callables
/// must be reentrant.
struct Problem {
  using ScalarFn = std::function<double(const Vec&)>;
  using VectorFn = std::function<Vec(const Vec&)>;
  using MatrixFn = std::function<Mat(const Vec&)>;
  using MatrixListFn = std::function<std::vector<Mat>(const Vec&)>;

  std::string name;
  int dim_x = 0;
  int dim_h = 0;
  ScalarFn objective;
  VectorFn gradient;
  VectorFn constraints;
  MatrixFn jacobian;
  MatrixFn hessian_phi;
  MatrixListFn hessian_h;
  std::optional<double> strong_convexity;
  /// h(x) = A x + b. Enables analytic drift reductions (zero constraint
  /// curvature, constant Jacobian).
  bool linear_constraints = false;
  double fd_step = kDefaultFdStep;

  double phi(const Vec& x) const;
  Vec grad(const Vec& x) const;
  Vec h(const Vec& x) const;
  Mat jac(const Vec& x) const;
  Mat hess_phi(const Vec& x) const;
  /// One n x n Hessian per constraint component.
  std::vector<Mat> hess_h(const Vec& x) const;

  /// Checks that the mandatory callables exist and that every callable
  /// returns the declared dimensions at x.
  void validate(const Vec& x) const;
  void check_x(const Vec& x) const;
  void check_lambda(const Vec& lam) const;
};

/// Candidate KKT pair with its first-order residuals.
struct KktPoint {
  Vec x_star;
  Vec lambda_star;
  double stationarity_residual = 0.0;
  double feasibility_residual = 0.0;

  static KktPoint evaluate(const Problem& problem, const Vec& x,
                           const Vec& lam);
};

struct FoncResiduals {
  double stationarity = 0.0;
  double feasibility = 0.0;
};

/// L(x, lam) = phi(x) + lam^T h(x).
double lagrangian(const Problem& problem, const Vec& x, const Vec& lam);

/// (||grad phi + J^T lam||_2, ||h(x)||_2).
FoncResiduals fonc_residuals(const Problem& problem, const Vec& x,
                             const Vec& lam);

/// Hessian of the Lagrangian in x.
Mat lagrangian_hessian(const Problem& problem, const Vec& x, const Vec& lam);

/// True iff the Lagrangian Hessian restricted to an orthonormal basis of
/// ker(J_h(x)) has minimum eigenvalue >= -tol. Vacuously true when the
/// kernel is trivial. Throws RankDeficientError when J_h(x) is not of full
/// row rank.
bool sonc_check(const Problem& problem, const Vec& x, const Vec& lam,
                double tol);

/// Least-squares multiplier estimate lam = -(J J^T)^{-1} J grad phi.
Vec multiplier_estimate(const Problem& problem, const Vec& x,
                        double reg = 0.0);

}  // namespace slideopt

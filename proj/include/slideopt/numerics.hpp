#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace slideopt {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = Vector<double>;
using Mat = Matrix<double>;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a Gram matrix J J^T is singular (or numerically so) and no
/// regularization was requested.
class RankDeficientError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteError : public NumericalError {
 public:
  NonFiniteError(const std::string& what, Eigen::Index index)
      : NumericalError(what), index_(index) {}
  Eigen::Index index() const { return index_; }

 private:
  Eigen::Index index_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultFdStep = 1e-6;
inline constexpr double kDefaultGramReg = 1e-8;
/// Condition estimate of J J^T above which an unregularized solve fails.
inline constexpr double kMaxGramCondition = 1e12;

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& v, const char* what) {
  const typename Derived::PlainObject dense = v;
  for (Eigen::Index i = 0; i < dense.size(); ++i) {
    if (!std::isfinite(dense.data()[i])) {
      throw NonFiniteError(std::string(what) + ": non-finite entry at index " +
                               std::to_string(i),
                           i);
    }
  }
}

}  // namespace detail

/// Elementwise sign with sign(0) = 0.
template <typename Derived>
auto sign(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  return v.unaryExpr([](Scalar a) {
    return a > Scalar(0) ? Scalar(1) : (a < Scalar(0) ? Scalar(-1) : Scalar(0));
  });
}

template <typename Scalar>
  requires std::is_arithmetic_v<Scalar>
Scalar sign(Scalar a) {
  return a > Scalar(0) ? Scalar(1) : (a < Scalar(0) ? Scalar(-1) : Scalar(0));
}

/// Elementwise sat(v / eps), clipped to [-1, 1].
template <typename Derived>
auto sat(const Eigen::MatrixBase<Derived>& v, typename Derived::Scalar eps) {
  using Scalar = typename Derived::Scalar;
  return v.unaryExpr([eps](Scalar a) {
    const Scalar r = a / eps;
    return r > Scalar(1) ? Scalar(1) : (r < Scalar(-1) ? Scalar(-1) : r);
  });
}

/// Elementwise |v|^a sgn(v).
template <typename Derived>
auto signed_pow(const Eigen::MatrixBase<Derived>& v,
                typename Derived::Scalar a) {
  using Scalar = typename Derived::Scalar;
  return v.unaryExpr(
      [a](Scalar s) { return std::pow(std::abs(s), a) * sign(s); });
}

/// Central-difference Jacobian of f at x.
///
/// Entry (i, j) is (f_i(x + step e_j) - f_i(x - step e_j)) / (2 step). A
/// non-finite evaluation throws NonFiniteError carrying the offending column.
template <typename F, typename Derived>
Matrix<typename Derived::Scalar> fd_jacobian(
    F&& f, const Eigen::MatrixBase<Derived>& x,
    typename Derived::Scalar step = kDefaultFdStep) {
  using Scalar = typename Derived::Scalar;
  if (!(step > Scalar(0))) {
    throw std::invalid_argument("fd_jacobian: step must be positive");
  }
  Vector<Scalar> xp = x;
  Vector<Scalar> xm = x;
  Matrix<Scalar> jac;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp(j) = x(j) + step;
    xm(j) = x(j) - step;
    const Vector<Scalar> fp = f(xp);
    const Vector<Scalar> fm = f(xm);
    xp(j) = x(j);
    xm(j) = x(j);
    if (j == 0) jac.resize(fp.size(), x.size());
    if (fp.size() != jac.rows() || fm.size() != jac.rows()) {
      throw DimensionError("fd_jacobian: output dimension changed");
    }
    if (!fp.allFinite() || !fm.allFinite()) {
      throw NonFiniteError("fd_jacobian: non-finite evaluation at column " +
                               std::to_string(j),
                           j);
    }
    jac.col(j) = (fp - fm) / (Scalar(2) * step);
  }
  return jac;
}

/// Cholesky factorization of J J^T + reg I with the rank-deficiency check
/// applied when reg == 0.
template <typename Derived>
Eigen::LDLT<Matrix<typename Derived::Scalar>> gram_factor(
    const Eigen::MatrixBase<Derived>& J, typename Derived::Scalar reg) {
  using Scalar = typename Derived::Scalar;
  if (reg < Scalar(0)) {
    throw std::invalid_argument("gram_factor: regularization must be >= 0");
  }
  Matrix<Scalar> gram = J * J.transpose();
  gram.diagonal().array() += reg;
  Eigen::LDLT<Matrix<Scalar>> ldlt(gram);
  if (reg == Scalar(0)) {
    const Scalar rc = ldlt.info() == Eigen::Success ? ldlt.rcond() : Scalar(0);
    const auto d = ldlt.vectorD().cwiseAbs();
    const Scalar pivots = d.size() > 0 ? d.minCoeff() / d.maxCoeff() : Scalar(1);
    if (!(rc > Scalar(0)) || Scalar(1) / rc > Scalar(kMaxGramCondition) ||
        !(pivots * Scalar(kMaxGramCondition) > Scalar(1)) ||
        !ldlt.isPositive()) {
      throw RankDeficientError(
          "Gram matrix J J^T is singular or ill-conditioned; supply a "
          "positive regularization");
    }
  }
  return ldlt;
}

/// Solves (J J^T + reg I) y = b.
template <typename DerivedJ, typename DerivedB>
Vector<typename DerivedJ::Scalar> gram_solve(
    const Eigen::MatrixBase<DerivedJ>& J, const Eigen::MatrixBase<DerivedB>& b,
    typename DerivedJ::Scalar reg) {
  if (b.size() != J.rows()) {
    throw DimensionError("gram_solve: dim(b) != rows(J)");
  }
  detail::require_finite(J, "gram_solve");
  return gram_factor(J, reg).solve(b);
}

/// P = I - J^T (J J^T + reg I)^{-1} J. With reg = 0 and J of full row rank
/// this is the orthogonal projector onto ker(J).
template <typename Derived>
Matrix<typename Derived::Scalar> projector(const Eigen::MatrixBase<Derived>& J,
                                           typename Derived::Scalar reg) {
  using Scalar = typename Derived::Scalar;
  detail::require_finite(J, "projector");
  const auto ldlt = gram_factor(J, reg);
  Matrix<Scalar> p = -J.transpose() * ldlt.solve(Matrix<Scalar>(J));
  p.diagonal().array() += Scalar(1);
  return p;
}

/// Largest singular value of J J^T, i.e. sigma_max(J)^2.
template <typename Derived>
typename Derived::Scalar sigma_max_gram(const Eigen::MatrixBase<Derived>& J) {
  using Scalar = typename Derived::Scalar;
  if (J.size() == 0) throw DimensionError("sigma_max_gram: empty matrix");
  detail::require_finite(J, "sigma_max_gram");
  Eigen::JacobiSVD<Matrix<Scalar>> svd(J);
  const Scalar s = svd.singularValues()(0);
  return s * s;
}

/// Smallest singular value of J J^T (zero when J is row-rank deficient).
template <typename Derived>
typename Derived::Scalar sigma_min_gram(const Eigen::MatrixBase<Derived>& J) {
  using Scalar = typename Derived::Scalar;
  if (J.size() == 0) throw DimensionError("sigma_min_gram: empty matrix");
  if (J.rows() > J.cols()) return Scalar(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(J);
  const Scalar s = svd.singularValues()(J.rows() - 1);
  return s * s;
}

/// Orthonormal basis of ker(J) as columns. Singular values below
/// rel_tol * sigma_max count as zero.
template <typename Derived>
Matrix<typename Derived::Scalar> null_space(
    const Eigen::MatrixBase<Derived>& J,
    typename Derived::Scalar rel_tol = typename Derived::Scalar(1e-10)) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = J.cols();
  if (J.rows() == 0) return Matrix<Scalar>::Identity(n, n);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(J, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Scalar cutoff = rel_tol * (sv.size() > 0 ? sv(0) : Scalar(0));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

/// Numerical row rank with the same relative cutoff as null_space.
template <typename Derived>
Eigen::Index row_rank(const Eigen::MatrixBase<Derived>& J,
                      typename Derived::Scalar rel_tol =
                          typename Derived::Scalar(1e-10)) {
  using Scalar = typename Derived::Scalar;
  if (J.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix<Scalar>> svd(J);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

}  // namespace slideopt

#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "udcap/types.hpp"

namespace udcap {

/// log det of a Hermitian positive definite matrix from the diagonal of its
/// Cholesky factor, summed in log space. Throws on a failed factorization.
template <typename Derived>
typename Eigen::NumTraits<typename Derived::Scalar>::Real
hermitian_logdet(const Eigen::MatrixBase<Derived> &a) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  Eigen::LLT<Matrix<Scalar>> llt(a);
  if (llt.info() != Eigen::Success)
    throw Error("numeric", "Xi", "Cholesky factorization failed (matrix not positive definite)");
  Real acc(0);
  const auto &l = llt.matrixLLT();
  for (Index i = 0; i < l.rows(); ++i)
    acc += std::log(std::real(l(i, i)));
  return Real(2) * acc;
}

/// Returns scale * a * a^H assembled through the lower triangle and mirrored,
/// so the result is Hermitian bit-for-bit with a real diagonal.
template <typename Derived>
Matrix<typename Derived::Scalar>
hermitian_outer(const Eigen::MatrixBase<Derived> &a,
                typename Eigen::NumTraits<typename Derived::Scalar>::Real scale) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out = Matrix<Scalar>::Zero(a.rows(), a.rows());
  if (a.cols() > 0)
    out.template selfadjointView<Eigen::Lower>().rankUpdate(a.derived(), scale);
  for (Index j = 0; j < out.cols(); ++j) {
    out(j, j) = Scalar(std::real(out(j, j)));
    for (Index i = j + 1; i < out.rows(); ++i)
      out(j, i) = Eigen::numext::conj(out(i, j));
  }
  return out;
}

/// ||chol(xi)^{-1} * b||_F^2, i.e. trace(b^H xi^{-1} b), from one
/// factorization and a triangular solve.
template <typename DerivedA, typename DerivedB>
typename Eigen::NumTraits<typename DerivedA::Scalar>::Real
whitened_energy(const Eigen::MatrixBase<DerivedA> &xi,
                const Eigen::MatrixBase<DerivedB> &b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::LLT<Matrix<Scalar>> llt(xi);
  if (llt.info() != Eigen::Success)
    throw Error("numeric", "Xi", "Cholesky factorization failed (matrix not positive definite)");
  Matrix<Scalar> w = b;
  llt.matrixL().solveInPlace(w);
  return w.squaredNorm();
}

} // namespace udcap

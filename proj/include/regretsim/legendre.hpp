#ifndef REGRETSIM_LEGENDRE_HPP
#define REGRETSIM_LEGENDRE_HPP

#include <Eigen/Core>

#include <cmath>

#include "regretsim/types.hpp"

// Entropic regularizer F on the simplex and its convex conjugate G
// (scaled log-sum-exp) on R^n, with gradients and Hessian. All functions
// are pure and accept any dense Eigen expression; the dimension n is the
// runtime size of the argument.

namespace regretsim {

// F(x) = beta^{-1} sum_a x_a ln x_a, with the 0*ln(0) = 0 convention.
// Range is [-ln(n)/beta, 0] for x on the simplex.
template <typename Derived>
typename Derived::Scalar entropy_F(const Eigen::MatrixBase<Derived>& x,
                                   Temperature beta) {
  using Scalar = typename Derived::Scalar;
  validate_simplex(x);
  Scalar acc(0);
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    const Scalar xa = x(a);
    if (xa > Scalar(0)) acc += xa * std::log(xa);
  }
  return acc / Scalar(beta.beta());
}

// G(y) = beta^{-1} ln sum_a exp(beta y_a), evaluated with max-subtraction
// so no intermediate overflows for beta*|y|_inf up to 1e6 and beyond.
template <typename Derived>
typename Derived::Scalar conjugate_G(const Eigen::MatrixBase<Derived>& y,
                                     Temperature beta) {
  using Scalar = typename Derived::Scalar;
  validate_finite(y);
  const Scalar b(beta.beta());
  const Scalar m = y.maxCoeff();
  Scalar acc(0);
  for (Eigen::Index a = 0; a < y.size(); ++a) {
    acc += std::exp(b * (y(a) - m));
  }
  return m + std::log(acc) / b;
}

// (grad G(y))_a = exp(beta y_a) / sum_c exp(beta y_c): the softmax of
// beta*y. Renormalized after exponentiation so the result is a valid
// simplex point. Invariant under shifts y -> y + c*1.
template <typename Derived>
Eigen::Vector<typename Derived::Scalar, Eigen::Dynamic> grad_G(
    const Eigen::MatrixBase<Derived>& y, Temperature beta) {
  using Scalar = typename Derived::Scalar;
  validate_finite(y);
  const Scalar b(beta.beta());
  const Scalar m = y.maxCoeff();
  Eigen::Vector<Scalar, Eigen::Dynamic> x =
      ((y.array() - m) * b).exp().matrix();
  x /= x.sum();
  return x;
}

// (hess G(y))_{ab} = beta (delta_{ab} x_a - x_a x_b) with x = grad_G(y).
// Symmetric PSD; rows sum to zero; trace <= beta.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
hess_G(const Eigen::MatrixBase<Derived>& y, Temperature beta) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Vector<Scalar, Eigen::Dynamic> x = grad_G(y, beta);
  return hess_G_at(x, beta);
}

// Hessian of G expressed through the primal point x = grad_G(y).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
hess_G_at(const Eigen::MatrixBase<Derived>& x, Temperature beta) {
  using Scalar = typename Derived::Scalar;
  const Scalar b(beta.beta());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> h =
      (-b) * (x * x.transpose());
  h.diagonal() += b * x;
  return h;
}

// Fenchel-Young gap F(x) + G(y) - x^T y. Nonnegative for all valid
// inputs; zero exactly when x = grad_G(y).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar fenchel_gap(const Eigen::MatrixBase<DerivedX>& x,
                                      const Eigen::MatrixBase<DerivedY>& y,
                                      Temperature beta) {
  return entropy_F(x, beta) + conjugate_G(y, beta) - x.dot(y);
}

// argmax_{x in simplex} (x^T s - F(x)). By conjugacy this is grad_G(s);
// kept as a named alias so the online-learning loops read like the
// protocol they implement.
template <typename Derived>
Eigen::Vector<typename Derived::Scalar, Eigen::Dynamic> ftrl_argmax(
    const Eigen::MatrixBase<Derived>& s, Temperature beta) {
  return grad_G(s, beta);
}

}  // namespace regretsim

#endif  // REGRETSIM_LEGENDRE_HPP

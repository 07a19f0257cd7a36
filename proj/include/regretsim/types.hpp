#ifndef REGRETSIM_TYPES_HPP
#define REGRETSIM_TYPES_HPP

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace regretsim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Tolerance accepted on |sum(x) - 1| when validating probability vectors.
// Outputs of grad_G are renormalized, so round-off never exceeds this.
inline constexpr double kSimplexTol = 1e-12;

// Inverse-temperature cap; softmax degenerates to a hard argmax beyond it.
inline constexpr double kBetaCap = 1e6;

// Thrown when a linear solve meets a singular or nearly singular matrix
// (condition number beyond the configured guard).
class condition_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown by CSV loaders; carries the 1-based row number of the offending line.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, int row)
      : std::runtime_error(what), row_(row) {}
  int row() const { return row_; }

 private:
  int row_;
};

// Inverse-temperature parameter of the entropic regularizer pair.
class Temperature {
 public:
  explicit Temperature(double beta) : beta_(beta) {
    if (!std::isfinite(beta) || beta <= 0.0) {
      throw std::domain_error("temperature beta must be positive and finite");
    }
  }
  double beta() const { return beta_; }

 private:
  double beta_;
};

template <typename Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

// A probability vector: nonnegative entries summing to 1 within kSimplexTol.
template <typename Derived>
bool is_simplex(const Eigen::MatrixBase<Derived>& x, double tol = kSimplexTol) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0 || !x.allFinite()) return false;
  if ((x.array() < Scalar(0)).any()) return false;
  return std::abs(double(x.sum()) - 1.0) <= tol;
}

template <typename Derived>
void validate_simplex(const Eigen::MatrixBase<Derived>& x,
                      double tol = kSimplexTol) {
  if (!is_simplex(x, tol)) {
    throw std::domain_error("vector is not a valid probability simplex point");
  }
}

template <typename Derived>
void validate_finite(const Eigen::MatrixBase<Derived>& y) {
  if (y.size() == 0 || !y.allFinite()) {
    throw std::domain_error("vector must be nonempty and finite");
  }
}

}  // namespace regretsim

#endif  // REGRETSIM_TYPES_HPP

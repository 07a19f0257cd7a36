#ifndef REGRETSIM_NUMERICS_HPP
#define REGRETSIM_NUMERICS_HPP

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "regretsim/types.hpp"

// Shared numerical kernels: symmetric PSD square root, Euler-Maruyama
// stepping, counter-based splittable Gaussian noise, and left-endpoint
// quadrature on a uniform time grid.

namespace regretsim {

// Uniform grid on [0, T] with `steps` intervals. Times are computed as
// T * (i / steps) so time(steps) == T exactly.
class TimeGrid {
 public:
  TimeGrid(double horizon, std::int64_t steps)
      : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
      throw std::invalid_argument("grid horizon must be positive and finite");
    }
    if (steps < 1) {
      throw std::invalid_argument("grid must have at least one step");
    }
  }

  double horizon() const { return horizon_; }
  std::int64_t steps() const { return steps_; }
  double dt() const { return horizon_ / double(steps_); }
  double time(std::int64_t i) const {
    return horizon_ * (double(i) / double(steps_));
  }

  // Index of a grid point, rejecting off-grid times.
  std::int64_t index_of(double t) const {
    const auto i = std::int64_t(std::llround(t / dt()));
    if (i < 0 || i > steps_ || std::abs(time(i) - t) > 1e-9 * std::max(1.0, horizon_)) {
      throw std::invalid_argument("time does not lie on the grid");
    }
    return i;
  }

 private:
  double horizon_;
  std::int64_t steps_;
};

// Identifies one deterministic noise stream: the Gaussian increments are
// a pure function of (master_seed, path_index, step_index), independent
// of thread schedule and platform.
struct RandomStream {
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;
  std::uint64_t step_index = 0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Small counter-based generator (splitmix64 keyed by the stream triple,
// Box-Muller for normals). std::normal_distribution is not reproducible
// across standard libraries, so the transform is spelled out here.
class CounterRng {
 public:
  explicit CounterRng(const RandomStream& stream) {
    std::uint64_t h = detail::mix64(stream.master_seed);
    h = detail::mix64(h ^ (0x9e3779b97f4a7c15ull + stream.path_index));
    h = detail::mix64(h ^ (0xbf58476d1ce4e5b9ull + stream.step_index));
    state_ = h;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; draws are paired and cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log argument away from zero.
    const double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// n independent N(0, h) samples for one (seed, path, step) triple.
inline Vector gaussian_increment(const RandomStream& stream, Eigen::Index n,
                                 double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step size h must be positive");
  CounterRng rng(stream);
  const double scale = std::sqrt(h);
  Vector dw(n);
  for (Eigen::Index i = 0; i < n; ++i) dw(i) = scale * rng.gaussian();
  return dw;
}

// Symmetric PSD square root via eigendecomposition: S = V diag(l) V^T
// maps to V diag(sqrt(max(l, 0))) V^T. Eigenvalues below the (scale
// aware) PSD tolerance signal a covariance-construction bug upstream and
// raise a domain error rather than being silently absorbed.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
psd_sqrt(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (s.rows() != s.cols()) {
    throw std::domain_error("psd_sqrt: matrix must be square");
  }
  const Mat m = s;
  const double scale = std::max(1.0, double(m.cwiseAbs().maxCoeff()));
  if (double((m - m.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
    throw std::domain_error("psd_sqrt: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  }
  if (double(eig.eigenvalues().minCoeff()) < -1e-9 * scale) {
    throw std::domain_error("psd_sqrt: matrix has a significantly negative eigenvalue");
  }
  const auto sqrt_vals =
      eig.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt().eval();
  Mat root = eig.eigenvectors() * sqrt_vals.asDiagonal() *
             eig.eigenvectors().transpose();
  root = ((root + root.transpose()) / Scalar(2)).eval();
  return root;
}

// One Euler-Maruyama step: s + drift*h + sigma*dW. dW carries the
// variance h; the drift term uses the grid step explicitly.
inline Vector em_step(const Vector& s, const Vector& drift,
                      const Matrix& sigma, const Vector& dw, double h) {
  if (drift.size() != s.size() || sigma.rows() != s.size() ||
      sigma.cols() != dw.size()) {
    throw std::invalid_argument("em_step: dimension mismatch");
  }
  return s + drift * h + sigma * dw;
}

// Left Riemann sum of step-indexed samples f_0..f_{steps-1}. The left
// endpoint is mandatory: the value at step i must not see the interval
// [t_i, t_{i+1}) it integrates over.
inline double integrate_path(std::span<const double> f, const TimeGrid& grid) {
  if (std::int64_t(f.size()) != grid.steps()) {
    throw std::invalid_argument("integrate_path: sample count must equal grid steps");
  }
  double acc = 0.0;
  for (const double v : f) acc += v;
  return acc * grid.dt();
}

}  // namespace regretsim

#endif  // REGRETSIM_NUMERICS_HPP

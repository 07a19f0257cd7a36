#ifndef REGRETSIM_LINBANDIT_HPP
#define REGRETSIM_LINBANDIT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "regretsim/bandit.hpp"
#include "regretsim/legendre.hpp"
#include "regretsim/numerics.hpp"
#include "regretsim/report.hpp"
#include "regretsim/rewards.hpp"

// Adversarial linear bandit over a finite arm set in R^d: the state
// s(t) in R^d diffuses with the covariance of the least-squares style
// estimator r_hat = Q^{-1} a (a^T r), and the learner plays exponential
// weights over the k arms through p = grad_G(A s).

namespace regretsim {

// k x d matrix of arm feature rows; every row has l1 norm <= 1 and the
// rows span R^d.
class ArmSet {
 public:
  explicit ArmSet(Matrix arms);
  static ArmSet from_csv(const std::string& csv_text);

  const Matrix& matrix() const { return arms_; }
  int k() const { return int(arms_.rows()); }
  int d() const { return int(arms_.cols()); }
  Vector arm(int a) const { return arms_.row(a).transpose(); }

 private:
  Matrix arms_;
};

struct LinBanditRunConfig {
  ArmSet arms;
  double horizon;
  double beta;  // resolved value; use beta_schedule_linbandit for "auto"
  TimeGrid grid;
  RewardPath path;
  int n_paths = 1000;
  std::uint64_t master_seed = 0;
  double p_floor = 1e-6;
  int n_workers = 0;

  void validate() const;
};

// sqrt(2 ln k / (d T)).
double beta_schedule_linbandit(int d, int k, double horizon);

// Default uniform-exploration rate for the discrete baseline:
// min(1, 0.1 sqrt(d ln k / T)). A placeholder schedule; the optimal
// exploration distribution is arm-set dependent and out of scope.
double default_exploration_gamma(int d, int k, int t_rounds);

// Q = sum_a p_a a a^T, the p-weighted second moment of the arm features.
Matrix design_matrix_Q(const ArmSet& arms, const Vector& p);

// Symmetric inverse of Q with a condition-number guard (1e12); failure
// raises condition_error instead of falling back to a pseudo-inverse.
Matrix invert_design_matrix(const Matrix& q);

// Covariance of r_hat = Q^{-1} a (a^T r) under a ~ p:
// sum_a p_a (a^T r)^2 (Q^{-1} a)(Q^{-1} a)^T - r r^T.
Matrix linear_estimator_covariance(const ArmSet& arms, const Vector& p,
                                   const Vector& r);

// sum_a p_a Q^{-1} a (a^T r) - r; zero up to linear-solve accuracy.
Vector linear_unbiasedness_check(const ArmSet& arms, const Vector& p,
                                 const Vector& r);

// (1/2) tr(A Sigma A^T hess_G_at(p)): the quadratic variation rate of
// G(A s); bounded by beta * d / 2 for unit-l1 arms and r in [0,1]^d.
double quadratic_variation_check_linear(const ArmSet& arms, const Vector& p,
                                        const Vector& r, double beta);

struct LinBanditPathTrace {
  std::vector<double> time;
  Matrix probabilities;    // steps x k, the played (floored) p(t_i)
  Vector expected_reward;  // (A^T p)^T r(t_i)
  Matrix state;            // steps x d, s(t_i) before the step
};

LinBanditPathTrace simulate_linbandit_path(const LinBanditRunConfig& cfg,
                                           std::int64_t path_index);

// Monte Carlo regret estimate against sqrt(2 T d ln k); same path
// protocol and deterministic reduction as the plain bandit runner.
RegretReport run_continuous_linbandit(const LinBanditRunConfig& cfg,
                                      RegretCurve* curve = nullptr);

// Discrete baseline with uniform exploration mixing:
// p <- (1 - gamma) p + gamma / k before sampling and estimation.
RegretReport run_discrete_linbandit(const ArmSet& arms, int t_rounds,
                                    double beta, double gamma,
                                    const std::vector<Vector>& rewards,
                                    int n_episodes, std::uint64_t master_seed,
                                    RegretCurve* curve = nullptr);

namespace detail {

template <typename OnStep>
void linbandit_path_loop(const LinBanditRunConfig& cfg,
                         std::int64_t path_index, OnStep&& on_step) {
  const double h = cfg.grid.dt();
  const Temperature beta(cfg.beta);
  const Matrix& a = cfg.arms.matrix();
  const int d = cfg.arms.d();
  Vector s = Vector::Zero(d);
  for (std::int64_t i = 0; i < cfg.grid.steps(); ++i) {
    const double t = cfg.grid.time(i);
    const Vector p = floor_and_renormalize(grad_G(a * s, beta), cfg.p_floor);
    const Vector r = cfg.path.eval(t);
    on_step(i, t, s, p, (a.transpose() * p).dot(r));
    const Matrix sigma =
        psd_sqrt(linear_estimator_covariance(cfg.arms, p, r));
    const Vector dw = gaussian_increment(
        {cfg.master_seed, std::uint64_t(path_index), std::uint64_t(i)}, d, h);
    s = em_step(s, r, sigma, dw, h);
  }
}

}  // namespace detail

}  // namespace regretsim

#endif  // REGRETSIM_LINBANDIT_HPP

#ifndef REGRETSIM_BANDIT_HPP
#define REGRETSIM_BANDIT_HPP

#include <cstdint>
#include <vector>

#include "regretsim/legendre.hpp"
#include "regretsim/numerics.hpp"
#include "regretsim/report.hpp"
#include "regretsim/rewards.hpp"

// Adversarial bandit with d arms: the cumulative reward estimate s(t)
// diffuses as ds = r dt + sigma dB with sigma sigma^T the covariance of
// the importance-weighted one-hot estimator, and the learner plays
// p(t) = grad_G(s(t)). Includes the discrete exponential-weights
// baseline with the same estimator.

namespace regretsim {

struct BanditRunConfig {
  int d;
  double horizon;
  double beta;  // resolved value; use beta_schedule_bandit for "auto"
  TimeGrid grid;
  RewardPath path;
  int n_paths = 1000;
  std::uint64_t master_seed = 0;
  double p_floor = 1e-6;
  int n_workers = 0;  // 0 = hardware concurrency

  void validate() const;
};

// sqrt(2 ln d / (d T)), the rate-optimal inverse temperature.
double beta_schedule_bandit(int d, double horizon);

// Exploration floor as a uniform mixture: (1 - n*floor) * p + floor.
// Keeps every entry >= floor and the sum exactly 1; requires
// 0 < floor < 1/n.
Vector floor_and_renormalize(const Vector& p, double floor);

// Covariance of the importance-weighted estimator r_hat = (r_a / p_a) e_a
// under a ~ p: Sigma_ab = (r_a^2 / p_a) delta_ab - r_a r_b. The caller
// must have floored p first; entries below the floor are a domain error.
Matrix estimator_covariance(const Vector& r, const Vector& p, double p_floor);

// sum_a p_a (r_a / p_a) e_a - r. Zero up to round-off: the cancellation
// is algebraic.
Vector unbiasedness_check(const Vector& r, const Vector& p);

// (1/2) tr(Sigma(r, p) * hess_G_at(p)): the per-unit-time quadratic
// variation of G along the estimate SDE. Bounded by beta * d / 2 for
// r in [0,1]^d.
double quadratic_variation_check(const Vector& r, const Vector& p, double beta,
                                 double p_floor = 1e-6);

// Per-step record of one simulated path.
struct BanditPathTrace {
  std::vector<double> time;
  Matrix state;             // steps x d, s(t_i) before the step
  Matrix probabilities;     // steps x d, the played (floored) p(t_i)
  Vector expected_reward;   // p(t_i)^T r(t_i)
};

BanditPathTrace simulate_bandit_path(const BanditRunConfig& cfg,
                                     std::int64_t path_index);

// Monte Carlo estimate of the continuous-time regret over n_paths
// independent paths, against the sqrt(2 T d ln d) bound. Paths are
// simulated in parallel and reduced in path order, so results are
// independent of the worker count.
RegretReport run_continuous_bandit(const BanditRunConfig& cfg,
                                   RegretCurve* curve = nullptr);

// Discrete exponential-weights baseline: p_t from the accumulated
// importance-weighted estimates, one arm sampled per round, regret
// averaged over independent episodes against sqrt(2 T d ln d).
RegretReport run_discrete_exp3(int d, int t_rounds, double beta,
                               const std::vector<Vector>& rewards,
                               int n_episodes, std::uint64_t master_seed,
                               RegretCurve* curve = nullptr);

namespace detail {

// Covariance formula without the floor gate; requires strictly positive p.
Matrix importance_covariance(const Vector& r, const Vector& p);

// Shared stepping loop. on_step(i, t_i, s, p, p_dot_r) sees the state
// and the played distribution before the state advances.
template <typename OnStep>
void bandit_path_loop(const BanditRunConfig& cfg, std::int64_t path_index,
                      OnStep&& on_step) {
  const double h = cfg.grid.dt();
  const Temperature beta(cfg.beta);
  Vector s = Vector::Zero(cfg.d);
  for (std::int64_t i = 0; i < cfg.grid.steps(); ++i) {
    const double t = cfg.grid.time(i);
    const Vector p = floor_and_renormalize(grad_G(s, beta), cfg.p_floor);
    const Vector r = cfg.path.eval(t);
    on_step(i, t, s, p, p.dot(r));
    const Matrix sigma = psd_sqrt(estimator_covariance(r, p, cfg.p_floor));
    const Vector dw = gaussian_increment(
        {cfg.master_seed, std::uint64_t(path_index), std::uint64_t(i)}, cfg.d,
        h);
    s = em_step(s, r, sigma, dw, h);
  }
}

}  // namespace detail

}  // namespace regretsim

#endif  // REGRETSIM_BANDIT_HPP

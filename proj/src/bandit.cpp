#include "regretsim/bandit.hpp"

#include <cmath>

#include "regretsim/mc.hpp"
#include "regretsim/parallel.hpp"

namespace regretsim {

namespace {

int argmax_lowest_index(const Vector& v) {
  int best = 0;
  for (int a = 1; a < int(v.size()); ++a) {
    if (v(a) > v(best)) best = a;
  }
  return best;
}

// One-sided violation test for Monte Carlo estimates of an expectation
// bound; the slack absorbs Euler-Maruyama discretization bias.
void fill_mc_report(RegretReport& report, double bound, const McSummary& mc) {
  report.theoretical_bound = bound;
  report.std_error = mc.std_error;
  report.ci_halfwidth = 1.96 * mc.std_error;
  report.slack = 0.05 * bound;
  report.bound_violated = (report.measured_regret - 3.0 * mc.std_error) >
                          bound + report.slack;
}

}  // namespace

void BanditRunConfig::validate() const {
  if (d < 1) throw std::invalid_argument("bandit: d must be at least 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("bandit: horizon must be positive");
  if (!std::isfinite(beta) || beta <= 0.0 || beta > kBetaCap) {
    throw std::invalid_argument("bandit: beta must be in (0, 1e6]");
  }
  if (n_paths < 1) throw std::invalid_argument("bandit: n_paths must be at least 1");
  if (!(p_floor > 0.0) || !(p_floor < 1.0 / double(d))) {
    throw std::invalid_argument("bandit: p_floor must lie in (0, 1/d)");
  }
  if (path.dim() != d) throw std::invalid_argument("bandit: adversary dimension must equal d");
  if (path.horizon() < horizon) {
    throw std::invalid_argument("bandit: adversary horizon shorter than the run");
  }
  if (grid.horizon() != horizon) {
    throw std::invalid_argument("bandit: grid horizon must equal the run horizon");
  }
}

double beta_schedule_bandit(int d, double horizon) {
  if (d < 2) throw std::invalid_argument("beta schedule requires d >= 2");
  if (!(horizon > 0.0)) throw std::invalid_argument("beta schedule requires T > 0");
  return std::sqrt(2.0 * std::log(double(d)) / (double(d) * horizon));
}

Vector floor_and_renormalize(const Vector& p, double floor) {
  const auto n = p.size();
  validate_simplex(p);
  if (!(floor > 0.0) || !(floor < 1.0 / double(n))) {
    throw std::domain_error("floor must lie in (0, 1/n)");
  }
  return (1.0 - double(n) * floor) * p + Vector::Constant(n, floor);
}

namespace detail {

Matrix importance_covariance(const Vector& r, const Vector& p) {
  Matrix sigma = -(r * r.transpose());
  sigma.diagonal() += r.array().square().matrix().cwiseQuotient(p);
  return sigma;
}

}  // namespace detail

Matrix estimator_covariance(const Vector& r, const Vector& p, double p_floor) {
  if (r.size() != p.size()) {
    throw std::invalid_argument("estimator covariance: size mismatch");
  }
  if ((r.array() < 0.0).any() || (r.array() > 1.0).any()) {
    throw std::domain_error("estimator covariance: rewards must lie in [0,1]");
  }
  validate_simplex(p);
  if ((p.array() < p_floor).any()) {
    throw std::domain_error(
        "estimator covariance: probability below the floor; floor p first");
  }
  return detail::importance_covariance(r, p);
}

Vector unbiasedness_check(const Vector& r, const Vector& p) {
  if (r.size() != p.size()) {
    throw std::invalid_argument("unbiasedness check: size mismatch");
  }
  if ((p.array() <= 0.0).any()) {
    throw std::domain_error("unbiasedness check: p must be strictly positive");
  }
  Vector expected = Vector::Zero(r.size());
  for (Eigen::Index a = 0; a < r.size(); ++a) {
    expected(a) = p(a) * (r(a) / p(a));
  }
  return expected - r;
}

double quadratic_variation_check(const Vector& r, const Vector& p, double beta,
                                 double p_floor) {
  const Matrix sigma = estimator_covariance(r, p, p_floor);
  const Matrix hess = hess_G_at(p, Temperature(beta));
  return 0.5 * (sigma * hess).trace();
}

BanditPathTrace simulate_bandit_path(const BanditRunConfig& cfg,
                                     std::int64_t path_index) {
  cfg.validate();
  BanditPathTrace trace;
  const auto steps = cfg.grid.steps();
  trace.time.resize(std::size_t(steps));
  trace.state.resize(steps, cfg.d);
  trace.probabilities.resize(steps, cfg.d);
  trace.expected_reward.resize(steps);
  detail::bandit_path_loop(
      cfg, path_index,
      [&](std::int64_t i, double t, const Vector& s, const Vector& p,
          double p_dot_r) {
        trace.time[std::size_t(i)] = t;
        trace.state.row(i) = s.transpose();
        trace.probabilities.row(i) = p.transpose();
        trace.expected_reward(i) = p_dot_r;
      });
  return trace;
}

RegretReport run_continuous_bandit(const BanditRunConfig& cfg,
                                   RegretCurve* curve) {
  cfg.validate();
  const auto steps = cfg.grid.steps();
  const double h = cfg.grid.dt();
  const auto ckpt = curve_checkpoint_steps(steps);
  const int n_ckpt = int(ckpt.size());

  // Comparator side: cumulative per-arm reward on the same grid, so
  // identical arms yield exactly zero regret.
  Vector arm_cum = Vector::Zero(cfg.d);
  Matrix arm_ckpt(n_ckpt, cfg.d);
  for (std::int64_t i = 0, k = 0; i < steps; ++i) {
    arm_cum += cfg.path.eval(cfg.grid.time(i));
    if (k < n_ckpt && i + 1 == ckpt[std::size_t(k)]) {
      arm_ckpt.row(k++) = arm_cum.transpose() * h;
    }
  }
  const Vector arm_integrals = arm_cum * h;

  // Learner side: one expected-reward integral per path, plus the
  // running cumulative at the curve checkpoints.
  std::vector<double> learner(std::size_t(cfg.n_paths), 0.0);
  Matrix learner_ckpt(cfg.n_paths, n_ckpt);
  parallel_for_indices(cfg.n_paths, cfg.n_workers, [&](int path) {
    double acc = 0.0;
    int k = 0;
    detail::bandit_path_loop(
        cfg, path,
        [&](std::int64_t i, double, const Vector&, const Vector&,
            double p_dot_r) {
          acc += p_dot_r;
          if (k < n_ckpt && i + 1 == ckpt[std::size_t(k)]) {
            learner_ckpt(path, k++) = acc * h;
          }
        });
    learner[std::size_t(path)] = acc * h;
  });

  const McSummary mc = summarize_paths(learner);

  RegretReport report;
  report.best_comparator_index = argmax_lowest_index(arm_integrals);
  report.measured_regret =
      arm_integrals(report.best_comparator_index) - mc.mean;
  fill_mc_report(
      report,
      std::sqrt(2.0 * cfg.horizon * double(cfg.d) * std::log(double(cfg.d))),
      mc);

  if (curve) {
    curve->time.clear();
    curve->regret.clear();
    for (int k = 0; k < n_ckpt; ++k) {
      const double learner_mean = learner_ckpt.col(k).sum() / double(cfg.n_paths);
      curve->time.push_back(cfg.grid.time(ckpt[std::size_t(k)]));
      curve->regret.push_back(arm_ckpt.row(k).maxCoeff() - learner_mean);
    }
  }
  return report;
}

RegretReport run_discrete_exp3(int d, int t_rounds, double beta,
                               const std::vector<Vector>& rewards,
                               int n_episodes, std::uint64_t master_seed,
                               RegretCurve* curve) {
  if (d < 1) throw std::invalid_argument("exp3: d must be at least 1");
  if (t_rounds < 1) throw std::invalid_argument("exp3: need at least one round");
  if (n_episodes < 1) throw std::invalid_argument("exp3: need at least one episode");
  if (int(rewards.size()) != t_rounds) {
    throw std::invalid_argument("exp3: need one reward vector per round");
  }
  for (const auto& r : rewards) {
    if (int(r.size()) != d || (r.array() < 0.0).any() || (r.array() > 1.0).any()) {
      throw std::domain_error("exp3: rewards must lie in [0,1]^d");
    }
  }
  const Temperature temperature(beta);

  const auto ckpt = curve_checkpoint_steps(t_rounds);
  const int n_ckpt = int(ckpt.size());

  Vector arm_cum = Vector::Zero(d);
  Matrix arm_ckpt(n_ckpt, d);
  for (int t = 0, k = 0; t < t_rounds; ++t) {
    arm_cum += rewards[std::size_t(t)];
    if (k < n_ckpt && t + 1 == ckpt[std::size_t(k)]) {
      arm_ckpt.row(k++) = arm_cum.transpose();
    }
  }

  std::vector<double> learner(std::size_t(n_episodes), 0.0);
  Matrix learner_ckpt = Matrix::Zero(n_episodes, n_ckpt);
  for (int e = 0; e < n_episodes; ++e) {
    Vector estimate_sum = Vector::Zero(d);
    double acc = 0.0;
    int k = 0;
    for (int t = 0; t < t_rounds; ++t) {
      const Vector p = grad_G(estimate_sum, temperature);
      const Vector& r = rewards[std::size_t(t)];
      // Expected reward given p; lower variance than the realized pull.
      acc += p.dot(r);

      CounterRng rng({master_seed, std::uint64_t(e), std::uint64_t(t)});
      const double u = rng.uniform01();
      // Fallback to the modal arm: if round-off leaves the cumulative
      // sum short of u, the importance weight must not divide by an
      // underflowed probability.
      int arm = argmax_lowest_index(p);
      double cum = 0.0;
      for (int a = 0; a < d; ++a) {
        cum += p(a);
        if (u < cum) {
          arm = a;
          break;
        }
      }
      estimate_sum(arm) += r(arm) / p(arm);

      if (k < n_ckpt && t + 1 == ckpt[std::size_t(k)]) {
        learner_ckpt(e, k++) = acc;
      }
    }
    learner[std::size_t(e)] = acc;
  }

  const McSummary mc = summarize_paths(learner);

  RegretReport report;
  report.best_comparator_index = argmax_lowest_index(arm_cum);
  report.measured_regret = arm_cum(report.best_comparator_index) - mc.mean;
  fill_mc_report(
      report, std::sqrt(2.0 * double(t_rounds) * double(d) * std::log(double(d))),
      mc);

  if (curve) {
    curve->time.clear();
    curve->regret.clear();
    for (int k = 0; k < n_ckpt; ++k) {
      const double learner_mean =
          learner_ckpt.col(k).sum() / double(n_episodes);
      curve->time.push_back(double(ckpt[std::size_t(k)]));
      curve->regret.push_back(arm_ckpt.row(k).maxCoeff() - learner_mean);
    }
  }
  return report;
}

}  // namespace regretsim

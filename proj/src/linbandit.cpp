#include "regretsim/linbandit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <charconv>
#include <cmath>
#include <sstream>

#include "regretsim/mc.hpp"
#include "regretsim/parallel.hpp"

namespace regretsim {

namespace {

constexpr double kConditionGuard = 1e12;

int argmax_lowest_index(const Vector& v) {
  int best = 0;
  for (int a = 1; a < int(v.size()); ++a) {
    if (v(a) > v(best)) best = a;
  }
  return best;
}

void fill_mc_report(RegretReport& report, double bound, const McSummary& mc) {
  report.theoretical_bound = bound;
  report.std_error = mc.std_error;
  report.ci_halfwidth = 1.96 * mc.std_error;
  report.slack = 0.05 * bound;
  report.bound_violated = (report.measured_regret - 3.0 * mc.std_error) >
                          bound + report.slack;
}

void validate_reward_vector(const Vector& r, int d) {
  if (int(r.size()) != d || (r.array() < 0.0).any() || (r.array() > 1.0).any()) {
    throw std::domain_error("rewards must lie in [0,1]^d");
  }
}

}  // namespace

ArmSet::ArmSet(Matrix arms) : arms_(std::move(arms)) {
  const int k = int(arms_.rows());
  const int d = int(arms_.cols());
  if (d < 1 || k < d) {
    throw std::domain_error("arm set needs k >= d >= 1");
  }
  if (!arms_.allFinite()) {
    throw std::domain_error("arm features must be finite");
  }
  for (int a = 0; a < k; ++a) {
    const double l1 = arms_.row(a).cwiseAbs().sum();
    if (l1 > 1.0 + 1e-12) {
      throw std::domain_error("arm " + std::to_string(a + 1) +
                              " has l1 norm " + std::to_string(l1) + " > 1");
    }
  }
  const Eigen::ColPivHouseholderQR<Matrix> qr(arms_);
  if (int(qr.rank()) < d) {
    throw std::domain_error("arm set has rank " + std::to_string(qr.rank()) +
                            " < d = " + std::to_string(d) +
                            "; rows must span R^d");
  }
}

ArmSet ArmSet::from_csv(const std::string& csv_text) {
  std::stringstream ss(csv_text);
  std::string line;
  int row = 0;
  if (!std::getline(ss, line)) throw parse_error("empty arm file", 0);
  ++row;

  std::vector<std::string> header;
  {
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      header.push_back(cell);
    }
  }
  const int d = int(header.size());
  for (int i = 0; i < d; ++i) {
    if (header[std::size_t(i)] != "a_" + std::to_string(i + 1)) {
      throw parse_error("arm header column " + std::to_string(i + 1) +
                            " must be a_" + std::to_string(i + 1),
                        row);
    }
  }

  std::vector<Vector> rows;
  while (std::getline(ss, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::stringstream rs(line);
    std::string cell;
    Vector arm(d);
    int col = 0;
    while (std::getline(rs, cell, ',')) {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      if (col >= d) break;
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw parse_error("non-numeric cell '" + cell + "' in row " +
                              std::to_string(row),
                          row);
      }
      arm(col++) = value;
    }
    if (col != d) {
      throw parse_error("ragged row " + std::to_string(row), row);
    }
    rows.push_back(std::move(arm));
  }
  if (rows.empty()) throw parse_error("arm file has no arms", row);

  Matrix arms(int(rows.size()), d);
  for (int a = 0; a < int(rows.size()); ++a) {
    arms.row(a) = rows[std::size_t(a)].transpose();
  }
  return ArmSet(std::move(arms));
}

void LinBanditRunConfig::validate() const {
  const int k = arms.k();
  if (!(horizon > 0.0)) throw std::invalid_argument("linbandit: horizon must be positive");
  if (!std::isfinite(beta) || beta <= 0.0 || beta > kBetaCap) {
    throw std::invalid_argument("linbandit: beta must be in (0, 1e6]");
  }
  if (n_paths < 1) throw std::invalid_argument("linbandit: n_paths must be at least 1");
  if (!(p_floor > 0.0) || !(p_floor < 1.0 / double(k))) {
    throw std::invalid_argument("linbandit: p_floor must lie in (0, 1/k)");
  }
  if (path.dim() != arms.d()) {
    throw std::invalid_argument("linbandit: adversary dimension must equal d");
  }
  if (path.horizon() < horizon) {
    throw std::invalid_argument("linbandit: adversary horizon shorter than the run");
  }
  if (grid.horizon() != horizon) {
    throw std::invalid_argument("linbandit: grid horizon must equal the run horizon");
  }
}

double beta_schedule_linbandit(int d, int k, double horizon) {
  if (d < 1 || k < 2) throw std::invalid_argument("beta schedule requires k >= 2 arms");
  if (!(horizon > 0.0)) throw std::invalid_argument("beta schedule requires T > 0");
  return std::sqrt(2.0 * std::log(double(k)) / (double(d) * horizon));
}

double default_exploration_gamma(int d, int k, int t_rounds) {
  if (d < 1 || k < 2 || t_rounds < 1) {
    throw std::invalid_argument("exploration schedule needs d >= 1, k >= 2, T >= 1");
  }
  return std::min(
      1.0, 0.1 * std::sqrt(double(d) * std::log(double(k)) / double(t_rounds)));
}

Matrix design_matrix_Q(const ArmSet& arms, const Vector& p) {
  if (int(p.size()) != arms.k()) {
    throw std::invalid_argument("design matrix: p must have one entry per arm");
  }
  validate_simplex(p);
  const Matrix& a = arms.matrix();
  return a.transpose() * p.asDiagonal() * a;
}

Matrix invert_design_matrix(const Matrix& q) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
  if (eig.info() != Eigen::Success) {
    throw condition_error("design matrix eigendecomposition failed");
  }
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kConditionGuard) {
    throw condition_error(
        "design matrix is singular or ill conditioned (cond > 1e12); "
        "increase exploration (p_floor or gamma) or fix the arm set");
  }
  return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

namespace {

// Shared assembly: M = A Q^{-1} has rows (Q^{-1} a)^T, g = A r.
struct EstimatorParts {
  Matrix m;  // k x d
  Vector g;  // k
};

EstimatorParts estimator_parts(const ArmSet& arms, const Vector& p,
                               const Vector& r) {
  const Matrix q_inv = invert_design_matrix(design_matrix_Q(arms, p));
  return {arms.matrix() * q_inv, arms.matrix() * r};
}

}  // namespace

Matrix linear_estimator_covariance(const ArmSet& arms, const Vector& p,
                                   const Vector& r) {
  validate_reward_vector(r, arms.d());
  const auto [m, g] = estimator_parts(arms, p, r);
  const Vector weights = p.array() * g.array().square();
  return m.transpose() * weights.asDiagonal() * m - r * r.transpose();
}

Vector linear_unbiasedness_check(const ArmSet& arms, const Vector& p,
                                 const Vector& r) {
  validate_reward_vector(r, arms.d());
  const auto [m, g] = estimator_parts(arms, p, r);
  const Vector weights = p.array() * g.array();
  return m.transpose() * weights - r;
}

double quadratic_variation_check_linear(const ArmSet& arms, const Vector& p,
                                        const Vector& r, double beta) {
  const Matrix sigma = linear_estimator_covariance(arms, p, r);
  const Matrix& a = arms.matrix();
  const Matrix hess = hess_G_at(p, Temperature(beta));
  return 0.5 * (a * sigma * a.transpose() * hess).trace();
}

LinBanditPathTrace simulate_linbandit_path(const LinBanditRunConfig& cfg,
                                           std::int64_t path_index) {
  cfg.validate();
  LinBanditPathTrace trace;
  const auto steps = cfg.grid.steps();
  trace.time.resize(std::size_t(steps));
  trace.probabilities.resize(steps, cfg.arms.k());
  trace.expected_reward.resize(steps);
  trace.state.resize(steps, cfg.arms.d());
  detail::linbandit_path_loop(
      cfg, path_index,
      [&](std::int64_t i, double t, const Vector& s, const Vector& p,
          double expected) {
        trace.time[std::size_t(i)] = t;
        trace.state.row(i) = s.transpose();
        trace.probabilities.row(i) = p.transpose();
        trace.expected_reward(i) = expected;
      });
  return trace;
}

RegretReport run_continuous_linbandit(const LinBanditRunConfig& cfg,
                                      RegretCurve* curve) {
  cfg.validate();
  const auto steps = cfg.grid.steps();
  const double h = cfg.grid.dt();
  const int k = cfg.arms.k();
  const int d = cfg.arms.d();
  const auto ckpt = curve_checkpoint_steps(steps);
  const int n_ckpt = int(ckpt.size());

  Vector reward_cum = Vector::Zero(d);
  Matrix arm_ckpt(n_ckpt, k);
  for (std::int64_t i = 0, c = 0; i < steps; ++i) {
    reward_cum += cfg.path.eval(cfg.grid.time(i));
    if (c < n_ckpt && i + 1 == ckpt[std::size_t(c)]) {
      arm_ckpt.row(c++) = (cfg.arms.matrix() * reward_cum).transpose() * h;
    }
  }
  const Vector arm_integrals = cfg.arms.matrix() * reward_cum * h;

  std::vector<double> learner(std::size_t(cfg.n_paths), 0.0);
  Matrix learner_ckpt(cfg.n_paths, n_ckpt);
  parallel_for_indices(cfg.n_paths, cfg.n_workers, [&](int path) {
    double acc = 0.0;
    int c = 0;
    try {
      detail::linbandit_path_loop(
          cfg, path,
          [&](std::int64_t i, double, const Vector&, const Vector&,
              double expected) {
            acc += expected;
            if (c < n_ckpt && i + 1 == ckpt[std::size_t(c)]) {
              learner_ckpt(path, c++) = acc * h;
            }
          });
    } catch (const condition_error& e) {
      throw condition_error("path " + std::to_string(path) +
                            " aborted: " + e.what());
    }
    learner[std::size_t(path)] = acc * h;
  });

  const McSummary mc = summarize_paths(learner);

  RegretReport report;
  report.best_comparator_index = argmax_lowest_index(arm_integrals);
  report.measured_regret =
      arm_integrals(report.best_comparator_index) - mc.mean;
  fill_mc_report(
      report,
      std::sqrt(2.0 * cfg.horizon * double(d) * std::log(double(k))), mc);

  if (curve) {
    curve->time.clear();
    curve->regret.clear();
    for (int c = 0; c < n_ckpt; ++c) {
      const double learner_mean =
          learner_ckpt.col(c).sum() / double(cfg.n_paths);
      curve->time.push_back(cfg.grid.time(ckpt[std::size_t(c)]));
      curve->regret.push_back(arm_ckpt.row(c).maxCoeff() - learner_mean);
    }
  }
  return report;
}

RegretReport run_discrete_linbandit(const ArmSet& arms, int t_rounds,
                                    double beta, double gamma,
                                    const std::vector<Vector>& rewards,
                                    int n_episodes, std::uint64_t master_seed,
                                    RegretCurve* curve) {
  const int k = arms.k();
  const int d = arms.d();
  if (t_rounds < 1) throw std::invalid_argument("linbandit: need at least one round");
  if (n_episodes < 1) throw std::invalid_argument("linbandit: need at least one episode");
  if (!(gamma >= 0.0) || !(gamma <= 1.0)) {
    throw std::invalid_argument("linbandit: gamma must lie in [0, 1]");
  }
  if (int(rewards.size()) != t_rounds) {
    throw std::invalid_argument("linbandit: need one reward vector per round");
  }
  for (const auto& r : rewards) validate_reward_vector(r, d);
  const Temperature temperature(beta);

  const auto ckpt = curve_checkpoint_steps(t_rounds);
  const int n_ckpt = int(ckpt.size());

  Vector reward_cum = Vector::Zero(d);
  Matrix arm_ckpt(n_ckpt, k);
  for (int t = 0, c = 0; t < t_rounds; ++t) {
    reward_cum += rewards[std::size_t(t)];
    if (c < n_ckpt && t + 1 == ckpt[std::size_t(c)]) {
      arm_ckpt.row(c++) = (arms.matrix() * reward_cum).transpose();
    }
  }
  const Vector arm_totals = arms.matrix() * reward_cum;

  std::vector<double> learner(std::size_t(n_episodes), 0.0);
  Matrix learner_ckpt = Matrix::Zero(n_episodes, n_ckpt);
  const Vector uniform = Vector::Constant(k, 1.0 / double(k));
  for (int e = 0; e < n_episodes; ++e) {
    Vector estimate_sum = Vector::Zero(d);  // sum of r_hat in R^d
    double acc = 0.0;
    int c = 0;
    for (int t = 0; t < t_rounds; ++t) {
      Vector p = grad_G(arms.matrix() * estimate_sum, temperature);
      p = (1.0 - gamma) * p + gamma * uniform;
      const Vector& r = rewards[std::size_t(t)];
      acc += (arms.matrix().transpose() * p).dot(r);

      CounterRng rng({master_seed, std::uint64_t(e), std::uint64_t(t)});
      const double u = rng.uniform01();
      int arm = argmax_lowest_index(p);  // round-off fallback
      double cum = 0.0;
      for (int a = 0; a < k; ++a) {
        cum += p(a);
        if (u < cum) {
          arm = a;
          break;
        }
      }
      const Matrix q_inv = invert_design_matrix(design_matrix_Q(arms, p));
      const Vector chosen = arms.arm(arm);
      estimate_sum += q_inv * chosen * chosen.dot(r);

      if (c < n_ckpt && t + 1 == ckpt[std::size_t(c)]) {
        learner_ckpt(e, c++) = acc;
      }
    }
    learner[std::size_t(e)] = acc;
  }

  const McSummary mc = summarize_paths(learner);

  RegretReport report;
  report.best_comparator_index = argmax_lowest_index(arm_totals);
  report.measured_regret = arm_totals(report.best_comparator_index) - mc.mean;
  fill_mc_report(
      report,
      std::sqrt(2.0 * double(t_rounds) * double(d) * std::log(double(k))), mc);

  if (curve) {
    curve->time.clear();
    curve->regret.clear();
    for (int c = 0; c < n_ckpt; ++c) {
      const double learner_mean =
          learner_ckpt.col(c).sum() / double(n_episodes);
      curve->time.push_back(double(ckpt[std::size_t(c)]));
      curve->regret.push_back(arm_ckpt.row(c).maxCoeff() - learner_mean);
    }
  }
  return report;
}

}  // namespace regretsim

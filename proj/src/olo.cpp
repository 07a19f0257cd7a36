#include "regretsim/olo.hpp"

#include <cmath>

namespace regretsim {

namespace {

int argmax_lowest_index(const Vector& v) {
  int best = 0;
  for (int a = 1; a < int(v.size()); ++a) {
    if (v(a) > v(best)) best = a;
  }
  return best;
}

}  // namespace

void OloRunConfig::validate() const {
  if (d < 2) throw std::invalid_argument("olo: d must be at least 2");
  if (!(horizon > 0.0)) throw std::invalid_argument("olo: horizon must be positive");
  if (path.dim() != d) throw std::invalid_argument("olo: adversary dimension must equal d");
  if (path.horizon() < horizon) {
    throw std::invalid_argument("olo: adversary horizon shorter than the run");
  }
  if (grid.horizon() != horizon) {
    throw std::invalid_argument("olo: grid horizon must equal the run horizon");
  }
  if (beta.beta() > kBetaCap) {
    throw std::invalid_argument("olo: beta exceeds the 1e6 cap");
  }
}

double beta_schedule_olo(int d, double horizon, OloMode mode) {
  if (d < 2) throw std::invalid_argument("beta schedule requires d >= 2");
  if (!(horizon > 0.0)) throw std::invalid_argument("beta schedule requires T > 0");
  switch (mode) {
    case OloMode::kDiscrete:
      return std::sqrt(2.0 * std::log(double(d)) / horizon);
    case OloMode::kContinuous:
      return kContinuousOloBeta;
  }
  throw std::logic_error("unreachable olo mode");
}

RegretReport run_continuous_ftrl(const OloRunConfig& cfg, RegretCurve* curve) {
  cfg.validate();
  const auto steps = cfg.grid.steps();
  const double h = cfg.grid.dt();

  const std::int64_t curve_every =
      std::max<std::int64_t>(1, steps / kCurvePoints);
  if (curve) {
    curve->time.clear();
    curve->regret.clear();
  }

  Vector s = Vector::Zero(cfg.d);
  double learner = 0.0;
  for (std::int64_t i = 0; i < steps; ++i) {
    // x(t_i) depends on rewards strictly before t_i.
    const Vector x = ftrl_argmax(s, cfg.beta);
    const Vector r = cfg.path.eval(cfg.grid.time(i));
    learner += x.dot(r) * h;
    s += r * h;
    if (curve && ((i + 1) % curve_every == 0 || i + 1 == steps)) {
      curve->time.push_back(cfg.grid.time(i + 1));
      curve->regret.push_back(s.maxCoeff() - learner);
    }
  }

  RegretReport report;
  report.best_comparator_index = argmax_lowest_index(s);
  report.measured_regret = s(report.best_comparator_index) - learner;
  report.theoretical_bound = std::log(double(cfg.d)) / cfg.beta.beta();
  // The bound is exact in continuous time; the left-endpoint quadrature
  // contributes at most O(h T d).
  report.slack = 1e-6 + h * cfg.horizon * double(cfg.d);
  report.bound_violated =
      report.measured_regret > report.theoretical_bound + report.slack;
  return report;
}

RegretReport run_discrete_ftrl(int d, int t_rounds, Temperature beta,
                               const std::vector<Vector>& rewards,
                               RegretCurve* curve) {
  if (d < 2) throw std::invalid_argument("discrete ftrl: d must be at least 2");
  if (t_rounds < 1) throw std::invalid_argument("discrete ftrl: need at least one round");
  if (int(rewards.size()) != t_rounds) {
    throw std::invalid_argument("discrete ftrl: need one reward vector per round");
  }
  for (const auto& r : rewards) {
    if (int(r.size()) != d || (r.array() < 0.0).any() || (r.array() > 1.0).any()) {
      throw std::domain_error("discrete ftrl: rewards must lie in [0,1]^d");
    }
  }

  const int curve_every = std::max(1, t_rounds / kCurvePoints);
  if (curve) {
    curve->time.clear();
    curve->regret.clear();
  }

  Vector cum = Vector::Zero(d);
  double learner = 0.0;
  for (int t = 0; t < t_rounds; ++t) {
    const Vector x = ftrl_argmax(cum, beta);
    learner += x.dot(rewards[t]);
    cum += rewards[t];
    if (curve && ((t + 1) % curve_every == 0 || t + 1 == t_rounds)) {
      curve->time.push_back(double(t + 1));
      curve->regret.push_back(cum.maxCoeff() - learner);
    }
  }

  RegretReport report;
  report.best_comparator_index = argmax_lowest_index(cum);
  report.measured_regret = cum(report.best_comparator_index) - learner;
  report.theoretical_bound =
      std::sqrt(2.0 * double(t_rounds) * std::log(double(d)));
  report.slack = 1e-9;
  report.bound_violated =
      report.measured_regret > report.theoretical_bound + report.slack;
  return report;
}

}  // namespace regretsim

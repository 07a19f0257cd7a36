#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "regretsim/bandit.hpp"

using namespace regretsim;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(Eigen::Index(xs.size()));
  Eigen::Index i = 0;
  for (const double x : xs) v(i++) = x;
  return v;
}

BanditRunConfig small_config(int d, double horizon, std::int64_t steps,
                             int n_paths, const RewardPath& path,
                             std::uint64_t seed = 1, double p_floor = 1e-6) {
  return {d,       horizon, beta_schedule_bandit(std::max(d, 2), horizon),
          TimeGrid(horizon, steps), path, n_paths, seed, p_floor, 0};
}
}  // namespace

TEST_CASE("floor_and_renormalize keeps the floor and the simplex") {
  oracles::TestRng rng(51);
  for (int c = 0; c < 500; ++c) {
    const int d = rng.uniform_int(1, 32);
    const double floor = rng.uniform(1e-8, 0.9 / double(d));
    const Vector p = floor_and_renormalize(rng.simplex(d), floor);
    CHECK(p.minCoeff() >= floor);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(floor_and_renormalize(vec({0.5, 0.5}), 0.6),
                  std::domain_error);
  CHECK_THROWS_AS(floor_and_renormalize(vec({0.5, 0.5}), 0.0),
                  std::domain_error);
}

TEST_CASE("estimator covariance closed form") {
  const Matrix sigma =
      estimator_covariance(vec({1.0, 1.0}), vec({0.5, 0.5}), 1e-6);
  CHECK(sigma(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sigma(0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(sigma(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(sigma(1, 1) == doctest::Approx(1.0).epsilon(1e-14));

  const Matrix zero =
      estimator_covariance(Vector::Zero(3), Vector::Constant(3, 1.0 / 3.0),
                           1e-6);
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("estimator covariance equals the enumeration oracle") {
  oracles::TestRng rng(52);
  for (int c = 0; c < 300; ++c) {
    const int d = rng.uniform_int(2, 8);
    const double floor = 1e-3;
    const Vector p = floor_and_renormalize(rng.simplex(d), floor);
    const Vector r = rng.box(d, 0.0, 1.0);
    const Matrix sigma = estimator_covariance(r, p, floor);
    CHECK((sigma - oracles::enum_bandit_covariance(r, p)).cwiseAbs().maxCoeff() <=
          1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("estimator covariance demands a floored distribution") {
  CHECK_THROWS_AS(
      estimator_covariance(vec({1.0, 0.0}), vec({1.0 - 1e-9, 1e-9}), 1e-6),
      std::domain_error);
  CHECK_THROWS_AS(estimator_covariance(vec({1.5, 0.0}), vec({0.5, 0.5}), 1e-6),
                  std::domain_error);
}

TEST_CASE("importance-weighted estimator is unbiased") {
  CHECK(unbiasedness_check(vec({1.0, 0.0}), vec({0.9, 0.1}))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  oracles::TestRng rng(53);
  for (int c = 0; c < 1000; ++c) {
    const int d = rng.uniform_int(2, 16);
    const Vector p = floor_and_renormalize(rng.simplex(d), 1e-4);
    const Vector r = rng.box(d, 0.0, 1.0);
    CHECK(unbiasedness_check(r, p).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("quadratic variation bound") {
  const double beta = 2.0;
  CHECK(quadratic_variation_check(Vector::Zero(4),
                                  Vector::Constant(4, 0.25), beta) == 0.0);

  const double qv = quadratic_variation_check(Vector::Ones(4),
                                              Vector::Constant(4, 0.25), beta);
  CHECK(qv > 0.0);
  CHECK(qv <= beta * 4.0 / 2.0 + 1e-9);

  oracles::TestRng rng(54);
  for (int c = 0; c < 2000; ++c) {
    const int d = rng.uniform_int(2, 32);
    const double b = rng.uniform(0.01, 10.0);
    const Vector p = floor_and_renormalize(rng.simplex(d), 1e-4);
    const Vector r = rng.box(d, 0.0, 1.0);
    CHECK(quadratic_variation_check(r, p, b, 1e-4) <=
          b * double(d) / 2.0 + 1e-9);
  }
}

TEST_CASE("simulated path freezes at uniform in the beta -> 0 limit") {
  const double horizon = 1.0;
  const auto path = RewardPath::constant(vec({0.9, 0.3, 0.0}), horizon);
  BanditRunConfig cfg = small_config(3, horizon, 200, 1, path);
  cfg.beta = 1e-12;
  const BanditPathTrace trace = simulate_bandit_path(cfg, 0);
  const double mean_reward = (0.9 + 0.3 + 0.0) / 3.0;
  for (std::int64_t i = 0; i < 200; ++i) {
    CHECK(std::abs(trace.probabilities(i, 0) - 1.0 / 3.0) <= 1e-9);
    CHECK(std::abs(trace.expected_reward(i) - mean_reward) <= 1e-9);
  }
}

TEST_CASE("single arm is deterministic with zero regret") {
  const double horizon = 2.0;
  const auto path = RewardPath::constant(vec({0.7}), horizon);
  BanditRunConfig cfg = small_config(1, horizon, 500, 4, path);
  cfg.beta = 1.0;
  const RegretReport report = run_continuous_bandit(cfg);
  CHECK(std::abs(report.measured_regret) <= 1e-12);
  CHECK(report.std_error == 0.0);  // all paths identical: Sigma is 0
  CHECK(!report.bound_violated);
}

TEST_CASE("path simulation is reproducible and plays the floored softmax") {
  const double horizon = 2.0;
  const auto path = RewardPath::constant(vec({1.0, 0.2}), horizon);
  BanditRunConfig cfg = small_config(2, horizon, 400, 1, path, 77, 1e-3);
  cfg.beta = 1.5;
  const BanditPathTrace a = simulate_bandit_path(cfg, 0);
  const BanditPathTrace b = simulate_bandit_path(cfg, 0);
  CHECK(a.probabilities == b.probabilities);
  CHECK(a.expected_reward == b.expected_reward);

  // Derivation invariant: the recorded p is floor(grad_G(s)) at every step.
  const Temperature beta(cfg.beta);
  for (std::int64_t i = 0; i < 400; ++i) {
    const Vector s = a.state.row(i).transpose();
    const Vector expected =
        floor_and_renormalize(grad_G(s, beta), cfg.p_floor);
    CHECK((a.probabilities.row(i).transpose() - expected)
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }

  const BanditPathTrace other = simulate_bandit_path(cfg, 1);
  CHECK(a.probabilities != other.probabilities);
}

TEST_CASE("continuous bandit reports the sqrt(2Td ln d) bound") {
  const double horizon = 10.0;
  const auto path = RewardPath::constant(vec({1.0, 0.5, 0.0}), horizon);
  BanditRunConfig cfg = small_config(3, horizon, 300, 40, path);
  const RegretReport report = run_continuous_bandit(cfg);
  CHECK(report.theoretical_bound ==
        doctest::Approx(8.1189123237097826).epsilon(1e-12));
  CHECK(report.best_comparator_index == 0);
  CHECK(report.measured_regret - 3.0 * report.std_error <=
        report.theoretical_bound + report.slack);
}

TEST_CASE("identical arms give zero regret within noise") {
  const double horizon = 4.0;
  const auto path = RewardPath::constant(vec({0.6, 0.6, 0.6}), horizon);
  const BanditRunConfig cfg = small_config(3, horizon, 500, 100, path);
  const RegretReport report = run_continuous_bandit(cfg);
  CHECK(std::abs(report.measured_regret) <=
        3.0 * report.std_error + 1e-9);
}

TEST_CASE("reports are identical across worker counts and repeats") {
  const double horizon = 3.0;
  const auto path = RewardPath::constant(vec({1.0, 0.0}), horizon);
  BanditRunConfig cfg = small_config(2, horizon, 200, 30, path, 5);
  cfg.n_workers = 1;
  const RegretReport serial = run_continuous_bandit(cfg);
  cfg.n_workers = 4;
  const RegretReport threaded = run_continuous_bandit(cfg);
  CHECK(serial.measured_regret == threaded.measured_regret);
  CHECK(serial.std_error == threaded.std_error);
  const RegretReport again = run_continuous_bandit(cfg);
  CHECK(again.measured_regret == threaded.measured_regret);
}

TEST_CASE("regret estimate is stable under step halving") {
  const double horizon = 2.0;
  const auto path = RewardPath::constant(vec({1.0, 0.0}), horizon);
  const RegretReport coarse =
      run_continuous_bandit(small_config(2, horizon, 1000, 400, path));
  const RegretReport fine =
      run_continuous_bandit(small_config(2, horizon, 2000, 400, path));
  const double tol = std::max(2.0 * (coarse.std_error + fine.std_error),
                              0.05 * coarse.theoretical_bound);
  CHECK(std::abs(coarse.measured_regret - fine.measured_regret) <= tol);
}

TEST_CASE("the probability floor does not distort the estimate") {
  const double horizon = 2.0;
  const auto path = RewardPath::constant(vec({1.0, 0.3, 0.0}), horizon);
  const RegretReport loose =
      run_continuous_bandit(small_config(3, horizon, 1000, 300, path, 9, 1e-4));
  const RegretReport tight =
      run_continuous_bandit(small_config(3, horizon, 1000, 300, path, 9, 1e-6));
  CHECK(std::abs(loose.measured_regret - tight.measured_regret) <=
        1.96 * (loose.std_error + tight.std_error) + 1e-6);
}

TEST_CASE("discrete Exp3 basics") {
  // Round one is uniform no matter the temperature, so for a single
  // round the regret is exactly max(r) - mean(r).
  const std::vector<Vector> one_round = {vec({0.8, 0.2})};
  const RegretReport single =
      run_discrete_exp3(2, 1, 5.0, one_round, 64, 3);
  CHECK(single.measured_regret == doctest::Approx(0.3).epsilon(1e-14));

  const std::vector<Vector> single_arm(10, vec({0.4}));
  const RegretReport one_arm = run_discrete_exp3(1, 10, 1.0, single_arm, 16, 3);
  CHECK(std::abs(one_arm.measured_regret) <= 1e-12);
  CHECK(!one_arm.bound_violated);
}

TEST_CASE("discrete Exp3 stays under its bound (T = 200, 500 episodes)") {
  const int rounds = 200;
  const std::vector<Vector> rewards(rounds, vec({1.0, 0.0}));
  const double beta = beta_schedule_bandit(2, double(rounds));
  const RegretReport report =
      run_discrete_exp3(2, rounds, beta, rewards, 500, 7);
  CHECK(report.theoretical_bound ==
        doctest::Approx(std::sqrt(2.0 * 200.0 * 2.0 * std::log(2.0)))
            .epsilon(1e-12));
  CHECK(report.measured_regret - 3.0 * report.std_error <=
        report.theoretical_bound);
  CHECK(!report.bound_violated);
}

TEST_CASE("bandit config validation") {
  const auto path = RewardPath::constant(vec({1.0, 0.0}), 1.0);
  BanditRunConfig cfg = small_config(2, 1.0, 100, 1, path);
  cfg.p_floor = 0.6;  // >= 1/d
  CHECK_THROWS_AS(run_continuous_bandit(cfg), std::invalid_argument);
  cfg.p_floor = 1e-6;
  cfg.n_paths = 0;
  CHECK_THROWS_AS(run_continuous_bandit(cfg), std::invalid_argument);
  cfg.n_paths = 1;
  cfg.beta = -1.0;
  CHECK_THROWS_AS(run_continuous_bandit(cfg), std::invalid_argument);
}

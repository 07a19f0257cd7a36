#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "regretsim/linbandit.hpp"

using namespace regretsim;

namespace {
Vector vec(std::initializer_list<double> xs) {
  Vector v(Eigen::Index(xs.size()));
  Eigen::Index i = 0;
  for (const double x : xs) v(i++) = x;
  return v;
}

ArmSet basis_arms(int d) { return ArmSet(Matrix::Identity(d, d)); }
}  // namespace

TEST_CASE("ArmSet validation") {
  CHECK_NOTHROW(basis_arms(3));

  Matrix too_long(2, 2);
  too_long << 0.8, 0.4, 1.0, 0.0;  // row 1 has l1 norm 1.2
  CHECK_THROWS_WITH_AS(ArmSet{too_long}, doctest::Contains("l1 norm"),
                       std::domain_error);

  Matrix rank_deficient(3, 2);  // all rows parallel to (1, 1)
  rank_deficient << 0.5, 0.5, 0.25, 0.25, 0.4, 0.4;
  CHECK_THROWS_WITH_AS(ArmSet{rank_deficient}, doctest::Contains("rank"),
                       std::domain_error);

  Matrix wide = Matrix::Identity(2, 3);
  CHECK_THROWS_AS(ArmSet{wide}, std::domain_error);  // k < d
}

TEST_CASE("ArmSet CSV loading") {
  const ArmSet arms = ArmSet::from_csv("a_1,a_2\n1,0\n0,1\n0.5,0.25\n");
  CHECK(arms.k() == 3);
  CHECK(arms.d() == 2);
  CHECK(arms.arm(2) == vec({0.5, 0.25}));

  CHECK_THROWS_AS(ArmSet::from_csv("b_1,a_2\n1,0\n0,1\n"), parse_error);
  CHECK_THROWS_WITH_AS(ArmSet::from_csv("a_1,a_2\n1,abc\n0,1\n"),
                       doctest::Contains("non-numeric"), parse_error);
  CHECK_THROWS_WITH_AS(ArmSet::from_csv("a_1,a_2\n1\n0,1\n"),
                       doctest::Contains("ragged"), parse_error);
  CHECK_THROWS_AS(ArmSet::from_csv("a_1,a_2\n"), parse_error);
}

TEST_CASE("design matrix on basis arms") {
  const ArmSet arms = basis_arms(4);
  const Vector uniform = Vector::Constant(4, 0.25);
  const Matrix q = design_matrix_Q(arms, uniform);
  CHECK((q - 0.25 * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("design matrix equals the enumeration sum") {
  oracles::TestRng rng(61);
  for (int c = 0; c < 200; ++c) {
    const int d = rng.uniform_int(2, 6);
    const int k = rng.uniform_int(d, 20);
    const ArmSet arms = oracles::spanning_arms(rng, k, d);
    const Vector p = rng.simplex(k);
    const Matrix q = design_matrix_Q(arms, p);
    Matrix expected = Matrix::Zero(d, d);
    for (int a = 0; a < k; ++a) {
      expected += p(a) * arms.arm(a) * arms.arm(a).transpose();
    }
    CHECK((q - expected).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("singular design matrices raise condition errors") {
  Vector a(2);
  a << 0.5, 0.5;
  const Matrix singular = a * a.transpose();  // rank one
  CHECK_THROWS_AS(invert_design_matrix(singular), condition_error);

  Matrix barely = Matrix::Identity(2, 2);
  barely(1, 1) = 1e-14;  // condition number 1e14
  CHECK_THROWS_AS(invert_design_matrix(barely), condition_error);

  CHECK_NOTHROW(invert_design_matrix(Matrix::Identity(3, 3)));
}

TEST_CASE("linear covariance reduces to the bandit covariance on basis arms") {
  oracles::TestRng rng(62);
  const int d = 4;
  const ArmSet arms = basis_arms(d);
  for (int c = 0; c < 100; ++c) {
    const Vector p = floor_and_renormalize(rng.simplex(d), 1e-3);
    const Vector r = rng.box(d, 0.0, 1.0);
    const Matrix lin = linear_estimator_covariance(arms, p, r);
    const Matrix plain = estimator_covariance(r, p, 1e-3);
    CHECK((lin - plain).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("linear covariance matches brute-force enumeration") {
  oracles::TestRng rng(63);
  const Matrix zero =
      linear_estimator_covariance(basis_arms(3), Vector::Constant(3, 1.0 / 3.0),
                                  Vector::Zero(3));
  CHECK(zero.cwiseAbs().maxCoeff() <= 1e-15);

  for (int c = 0; c < 150; ++c) {
    const int d = 3;
    const int k = 12;
    const ArmSet arms = oracles::spanning_arms(rng, k, d);
    const Vector p = floor_and_renormalize(rng.simplex(k), 1e-3);
    const Vector r = rng.box(d, 0.0, 1.0);
    const Matrix sigma = linear_estimator_covariance(arms, p, r);
    const Matrix expected = oracles::enum_linbandit_covariance(arms, p, r);
    CHECK((sigma - expected).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("linear estimator is unbiased") {
  oracles::TestRng rng(64);
  const ArmSet basis = basis_arms(3);
  const Vector uniform = Vector::Constant(3, 1.0 / 3.0);
  CHECK(linear_unbiasedness_check(basis, uniform, vec({0.9, 0.4, 0.1}))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);

  for (int c = 0; c < 100; ++c) {
    const int d = rng.uniform_int(2, 8);
    const int k = rng.uniform_int(d, 64);
    const ArmSet arms = oracles::spanning_arms(rng, k, d);
    const Vector p =
        floor_and_renormalize(rng.simplex(k), std::min(1e-3, 0.2 / double(k)));
    const Vector r = rng.box(d, 0.0, 1.0);
    CHECK(linear_unbiasedness_check(arms, p, r).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("quadratic variation bound and the proof's matrix identities") {
  oracles::TestRng rng(65);
  for (int c = 0; c < 2000; ++c) {
    const int d = rng.uniform_int(2, 8);
    const int k = rng.uniform_int(d, 32);
    const ArmSet arms = oracles::spanning_arms(rng, k, d);
    const Vector p =
        floor_and_renormalize(rng.simplex(k), std::min(1e-3, 0.2 / double(k)));
    const Vector r = rng.box(d, 0.0, 1.0);
    const double beta = rng.uniform(0.01, 10.0);

    const double qv = quadratic_variation_check_linear(arms, p, r, beta);
    CHECK(qv <= beta * double(d) / 2.0 + 1e-9);

    // A' diag(p) A = Q = sum_a p_a a a', both computed explicitly.
    const Matrix q = design_matrix_Q(arms, p);
    const Matrix via_diag =
        arms.matrix().transpose() * p.asDiagonal() * arms.matrix();
    Matrix via_sum = Matrix::Zero(d, d);
    for (int a = 0; a < k; ++a) {
      via_sum += arms.arm(a) * p(a) * arms.arm(a).transpose();
    }
    CHECK((via_diag - q).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((via_sum - q).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("basis arms reduce the linear bandit to the plain bandit") {
  const int d = 3;
  const double horizon = 5.0;
  const std::int64_t steps = 2000;
  const std::uint64_t seed = 99;
  const double beta = beta_schedule_bandit(d, horizon);
  const auto path = RewardPath::constant(vec({1.0, 0.5, 0.0}), horizon);

  const BanditRunConfig plain{d,    horizon, beta, TimeGrid(horizon, steps),
                              path, 60,      seed, 1e-6,
                              0};
  const LinBanditRunConfig linear{basis_arms(d), horizon, beta,
                                  TimeGrid(horizon, steps), path,
                                  60,            seed,    1e-6,
                                  0};

  // Entrywise agreement of the played distribution along a shared-noise
  // path; the two routes differ only in round-off through the Q solve.
  const BanditPathTrace plain_trace = simulate_bandit_path(plain, 0);
  const LinBanditPathTrace linear_trace = simulate_linbandit_path(linear, 0);
  CHECK((plain_trace.probabilities - linear_trace.probabilities)
            .cwiseAbs()
            .maxCoeff() <= 1e-8);

  const RegretReport plain_report = run_continuous_bandit(plain);
  const RegretReport linear_report = run_continuous_linbandit(linear);
  CHECK(std::abs(plain_report.measured_regret -
                 linear_report.measured_regret) <=
        2.0 * (plain_report.std_error + linear_report.std_error) + 1e-9);
}

TEST_CASE("identical arms give zero regret (d = 1)") {
  const double horizon = 3.0;
  const auto path = RewardPath::constant(vec({0.8}), horizon);
  Matrix rows = Matrix::Ones(5, 1);
  const LinBanditRunConfig cfg{ArmSet(rows), horizon, 0.5,
                               TimeGrid(horizon, 400), path,
                               40,           11,      1e-6,
                               0};
  const RegretReport report = run_continuous_linbandit(cfg);
  CHECK(std::abs(report.measured_regret) <= 3.0 * report.std_error + 1e-9);
}

TEST_CASE("continuous linbandit reports the sqrt(2Td ln k) bound") {
  oracles::TestRng rng(66);
  const ArmSet arms = oracles::spanning_arms(rng, 16, 3);
  const double horizon = 10.0;
  const auto path = RewardPath::constant(vec({1.0, 0.5, 0.0}), horizon);
  const LinBanditRunConfig cfg{arms, horizon,
                               beta_schedule_linbandit(3, 16, horizon),
                               TimeGrid(horizon, 250), path,
                               30,   2,
                               1e-6, 0};
  const RegretReport report = run_continuous_linbandit(cfg);
  CHECK(report.theoretical_bound ==
        doctest::Approx(12.897880575287820).epsilon(1e-12));
  CHECK(report.measured_regret - 3.0 * report.std_error <=
        report.theoretical_bound + report.slack);
}

TEST_CASE("doubling the arm count scales the bound by sqrt(ln 2k / ln k)") {
  const double horizon = 10.0;
  const double bound_k = std::sqrt(2.0 * horizon * 3.0 * std::log(8.0));
  const double bound_2k = std::sqrt(2.0 * horizon * 3.0 * std::log(16.0));
  CHECK(bound_2k / bound_k ==
        doctest::Approx(std::sqrt(std::log(16.0) / std::log(8.0)))
            .epsilon(1e-15));
}

TEST_CASE("starved exploration fails loudly with a condition error") {
  // With a huge beta the softmax pins the floor at 1e-13, so the design
  // matrix condition number crosses the 1e12 guard early in the run.
  const double horizon = 5.0;
  const auto path = RewardPath::constant(vec({1.0, 0.0}), horizon);
  const LinBanditRunConfig cfg{basis_arms(2), horizon, 100.0,
                               TimeGrid(horizon, 500), path,
                               2,             3,       1e-13,
                               0};
  CHECK_THROWS_AS(run_continuous_linbandit(cfg), condition_error);
}

TEST_CASE("discrete linbandit with full exploration is uniform") {
  const ArmSet arms = basis_arms(2);
  const std::vector<Vector> rewards = {vec({0.8, 0.2})};
  // gamma = 1 forces the uniform distribution; with T = 1 the regret is
  // exactly max_a a.r - mean_a a.r regardless of beta or episode count.
  const RegretReport report =
      run_discrete_linbandit(arms, 1, 3.0, 1.0, rewards, 32, 5);
  CHECK(report.measured_regret == doctest::Approx(0.3).epsilon(1e-14));
  // The first round is uniform for any gamma: empty history.
  const RegretReport first_round =
      run_discrete_linbandit(arms, 1, 3.0, 0.1, rewards, 32, 5);
  CHECK(first_round.measured_regret == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("discrete linbandit stays under its bound (T = 200, 500 episodes)") {
  const ArmSet arms = basis_arms(2);
  const int rounds = 200;
  const std::vector<Vector> rewards(rounds, vec({1.0, 0.0}));
  const double beta = beta_schedule_linbandit(2, 2, double(rounds));
  const RegretReport report =
      run_discrete_linbandit(arms, rounds, beta, 0.1, rewards, 500, 8);
  CHECK(report.theoretical_bound ==
        doctest::Approx(std::sqrt(2.0 * 200.0 * 2.0 * std::log(2.0)))
            .epsilon(1e-12));
  CHECK(report.measured_regret - 3.0 * report.std_error <=
        report.theoretical_bound);
}

TEST_CASE("discrete linbandit validation and gamma schedule") {
  const ArmSet arms = basis_arms(2);
  const std::vector<Vector> rewards = {vec({1.0, 0.0})};
  CHECK_THROWS_AS(run_discrete_linbandit(arms, 1, 1.0, 1.5, rewards, 4, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_discrete_linbandit(arms, 1, 1.0, -0.1, rewards, 4, 0),
                  std::invalid_argument);
  CHECK(default_exploration_gamma(2, 8, 100) ==
        doctest::Approx(0.1 * std::sqrt(2.0 * std::log(8.0) / 100.0))
            .epsilon(1e-14));
  CHECK(default_exploration_gamma(64, 64, 1) == 1.0);  // capped
}

TEST_CASE("beta schedule for the linear bandit") {
  CHECK(beta_schedule_linbandit(3, 16, 10.0) ==
        doctest::Approx(0.42992935250959401).epsilon(1e-12));
}

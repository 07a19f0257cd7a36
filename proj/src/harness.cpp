#include "regretsim/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "regretsim/mc.hpp"
#include "regretsim/version.hpp"

namespace regretsim {

using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------
// Config parsing

const std::set<std::string> kTopLevelKeys = {
    "problem",     "mode",    "d",       "T",          "T_rounds",
    "beta",        "steps",   "n_paths", "master_seed", "p_floor",
    "gamma",       "adversary", "arms_file", "output",  "workers",
    "dump_traces"};

const std::set<std::string> kAdversaryKeys = {"kind", "values", "omega",
                                              "phase", "file", "csv"};

[[noreturn]] void fail(const std::string& message) {
  throw config_error(message);
}

double require_number(const ordered_json& j, const std::string& field) {
  if (!j.is_number()) fail("field " + field + " must be a number");
  return j.get<double>();
}

std::int64_t require_integer(const ordered_json& j, const std::string& field) {
  if (!j.is_number_integer()) fail("field " + field + " must be an integer");
  return j.get<std::int64_t>();
}

std::string require_string(const ordered_json& j, const std::string& field) {
  if (!j.is_string()) fail("field " + field + " must be a string");
  return j.get<std::string>();
}

std::vector<double> require_number_array(const ordered_json& j,
                                         const std::string& field) {
  if (!j.is_array()) fail("field " + field + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail("field " + field + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AdversarySpec parse_adversary(const ordered_json& j) {
  if (!j.is_object()) fail("field adversary must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!kAdversaryKeys.count(key)) fail("unknown field: adversary." + key);
    (void)value;
  }
  if (!j.contains("kind")) fail("missing field: adversary.kind");
  AdversarySpec spec;
  spec.kind = require_string(j.at("kind"), "adversary.kind");
  if (spec.kind != "constant" && spec.kind != "sinusoid" &&
      spec.kind != "schedule") {
    fail("adversary.kind must be one of constant, sinusoid, schedule");
  }
  if (j.contains("values")) {
    spec.values = require_number_array(j.at("values"), "adversary.values");
  }
  if (j.contains("omega")) {
    spec.omega = require_number_array(j.at("omega"), "adversary.omega");
  }
  if (j.contains("phase")) {
    spec.phase = require_number_array(j.at("phase"), "adversary.phase");
  }
  if (j.contains("file")) {
    spec.file = require_string(j.at("file"), "adversary.file");
  }
  if (j.contains("csv")) {
    spec.csv = require_string(j.at("csv"), "adversary.csv");
  }
  if (spec.kind == "schedule" && !spec.file && !spec.csv) {
    fail("adversary of kind schedule needs adversary.file or adversary.csv");
  }
  return spec;
}

void resolve_auto_fields(ExperimentConfig& cfg) {
  const bool continuous = cfg.mode == "continuous";
  const double t = continuous ? cfg.horizon : double(cfg.t_rounds);
  if (cfg.beta_is_auto) {
    if (cfg.problem == "olo") {
      cfg.beta = beta_schedule_olo(
          cfg.d, t, continuous ? OloMode::kContinuous : OloMode::kDiscrete);
    } else if (cfg.problem == "bandit") {
      cfg.beta = beta_schedule_bandit(cfg.d, t);
    } else {
      cfg.beta = beta_schedule_linbandit(cfg.d, cfg.k, t);
    }
  }
  if (continuous && cfg.steps_is_auto) {
    cfg.steps = std::llround(1e4 * cfg.horizon);
    if (cfg.steps < 1) cfg.steps = 1;
  }
  if (cfg.problem == "linbandit" && !continuous && cfg.gamma_is_auto) {
    cfg.gamma = default_exploration_gamma(cfg.d, cfg.k, cfg.t_rounds);
  }
}

void validate_config(ExperimentConfig& cfg) {
  const bool continuous = cfg.mode == "continuous";
  if (cfg.problem == "olo" && cfg.d < 2) fail("olo requires d >= 2");
  if (cfg.d < 1) fail("d must be at least 1");
  if (continuous) {
    if (!(cfg.horizon > 0.0)) fail("T must be positive");
    if (cfg.steps < 1) fail("steps must be at least 1");
  } else if (cfg.t_rounds < 1) {
    fail("T_rounds must be at least 1");
  }
  if (!std::isfinite(cfg.beta) || cfg.beta <= 0.0 || cfg.beta > kBetaCap) {
    fail("beta must be positive or auto (and at most 1e6)");
  }
  if (cfg.n_paths < 1) fail("n_paths must be at least 1");
  if (cfg.problem != "olo") {
    const int n = cfg.problem == "linbandit" ? cfg.k : cfg.d;
    if (!(cfg.p_floor > 0.0) || !(cfg.p_floor < 1.0 / double(n))) {
      fail("p_floor must lie in (0, 1/" + std::to_string(n) + ")");
    }
  }
  if (!cfg.gamma_is_auto && (!(cfg.gamma >= 0.0) || !(cfg.gamma <= 1.0))) {
    fail("gamma must lie in [0, 1]");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kTopLevelKeys.count(key)) fail("unknown field: " + key);
    (void)value;
  }

  ExperimentConfig cfg;
  if (!j.contains("problem")) fail("missing field: problem");
  cfg.problem = require_string(j.at("problem"), "problem");
  if (cfg.problem != "olo" && cfg.problem != "bandit" &&
      cfg.problem != "linbandit") {
    fail("problem must be one of olo, bandit, linbandit");
  }
  if (!j.contains("mode")) fail("missing field: mode");
  cfg.mode = require_string(j.at("mode"), "mode");
  if (cfg.mode != "continuous" && cfg.mode != "discrete") {
    fail("mode must be continuous or discrete");
  }
  const bool continuous = cfg.mode == "continuous";

  if (continuous) {
    if (!j.contains("T")) fail("missing field: T");
    cfg.horizon = require_number(j.at("T"), "T");
    if (j.contains("T_rounds")) fail("T_rounds only applies to discrete mode");
  } else {
    if (!j.contains("T_rounds")) fail("missing field: T_rounds");
    cfg.t_rounds = int(require_integer(j.at("T_rounds"), "T_rounds"));
    if (j.contains("T")) fail("T only applies to continuous mode");
    if (j.contains("steps")) fail("steps only applies to continuous mode");
    if (j.contains("p_floor") && cfg.problem != "olo") {
      // Discrete baselines follow the round protocol without a floor.
      fail("p_floor only applies to continuous mode");
    }
  }

  if (cfg.problem == "linbandit") {
    if (!j.contains("arms_file")) fail("missing field: arms_file");
    cfg.arms_file = require_string(j.at("arms_file"), "arms_file");
    try {
      cfg.arms = ArmSet::from_csv(read_file(*cfg.arms_file));
    } catch (const std::exception& e) {
      fail("arms_file " + *cfg.arms_file + ": " + e.what());
    }
    cfg.k = cfg.arms->k();
    if (j.contains("d")) {
      const int d_given = int(require_integer(j.at("d"), "d"));
      if (d_given != cfg.arms->d()) {
        fail("d = " + std::to_string(d_given) + " conflicts with arm set (d = " +
             std::to_string(cfg.arms->d()) + ")");
      }
    }
    cfg.d = cfg.arms->d();
  } else {
    if (j.contains("arms_file")) fail("arms_file only applies to linbandit");
    if (!j.contains("d")) fail("missing field: d");
    cfg.d = int(require_integer(j.at("d"), "d"));
  }

  if (!j.contains("beta")) fail("missing field: beta");
  if (j.at("beta").is_string()) {
    if (j.at("beta").get<std::string>() != "auto") {
      fail("beta must be positive or auto");
    }
    cfg.beta_is_auto = true;
  } else {
    cfg.beta = require_number(j.at("beta"), "beta");
    if (!(cfg.beta > 0.0)) fail("beta must be positive or auto");
  }

  if (j.contains("steps")) {
    cfg.steps = require_integer(j.at("steps"), "steps");
    cfg.steps_is_auto = false;
  }
  if (j.contains("n_paths")) {
    cfg.n_paths = int(require_integer(j.at("n_paths"), "n_paths"));
  }
  if (j.contains("master_seed")) {
    if (!j.at("master_seed").is_number_integer()) {
      fail("field master_seed must be an integer");
    }
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  if (j.contains("p_floor")) {
    if (cfg.problem == "olo") fail("p_floor only applies to bandit problems");
    cfg.p_floor = require_number(j.at("p_floor"), "p_floor");
  }
  if (j.contains("gamma")) {
    if (!(cfg.problem == "linbandit" && !continuous)) {
      fail("gamma only applies to discrete linbandit");
    }
    cfg.gamma = require_number(j.at("gamma"), "gamma");
    cfg.gamma_is_auto = false;
  }
  if (!j.contains("adversary")) fail("missing field: adversary");
  cfg.adversary = parse_adversary(j.at("adversary"));
  if (cfg.adversary.file) {
    // Load now so a missing or invalid schedule fails at parse time.
    const std::string text = read_file(*cfg.adversary.file);
    try {
      load_schedule(text);
    } catch (const std::exception& e) {
      fail("adversary.file " + *cfg.adversary.file + ": " + e.what());
    }
    cfg.adversary.csv = text;
  }
  if (j.contains("output")) {
    cfg.output = require_string(j.at("output"), "output");
  }
  if (j.contains("workers")) {
    cfg.workers = int(require_integer(j.at("workers"), "workers"));
    if (cfg.workers < 0) fail("workers must be nonnegative");
  }
  if (j.contains("dump_traces")) {
    if (!continuous || cfg.problem == "olo") {
      fail("dump_traces only applies to continuous bandit problems");
    }
    const auto n = require_integer(j.at("dump_traces"), "dump_traces");
    if (n < 0) fail("dump_traces must be nonnegative");
    cfg.dump_traces = int(n);
  }

  resolve_auto_fields(cfg);
  validate_config(cfg);

  // Construct the adversary once so schema mismatches (dimension,
  // horizon coverage, value ranges) are config errors, not run failures.
  try {
    make_reward_path(cfg.adversary, cfg.d,
                     continuous ? cfg.horizon : double(cfg.t_rounds));
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("adversary: ") + e.what());
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  return parse_config(read_file(path));
}

// ---------------------------------------------------------------------
// Adversaries

RewardPath make_reward_path(const AdversarySpec& spec, int d, double horizon) {
  if (spec.kind == "constant") {
    Vector values(d);
    if (spec.values) {
      if (int(spec.values->size()) != d) {
        throw config_error("adversary.values must have d = " +
                           std::to_string(d) + " entries");
      }
      for (int a = 0; a < d; ++a) values(a) = (*spec.values)[std::size_t(a)];
    } else {
      // Default: distinct decreasing rewards (d - a) / d.
      for (int a = 0; a < d; ++a) values(a) = double(d - a) / double(d);
    }
    return RewardPath::constant(values, horizon);
  }
  if (spec.kind == "sinusoid") {
    Vector omega(d);
    Vector phase(d);
    if (spec.omega || spec.phase) {
      if (!spec.omega || !spec.phase || int(spec.omega->size()) != d ||
          int(spec.phase->size()) != d) {
        throw config_error(
            "adversary.omega and adversary.phase must both have d entries");
      }
      for (int a = 0; a < d; ++a) {
        omega(a) = (*spec.omega)[std::size_t(a)];
        phase(a) = (*spec.phase)[std::size_t(a)];
      }
    } else {
      for (int a = 0; a < d; ++a) {
        omega(a) = 1.0 + double(a % 3);
        phase(a) = 2.0 * M_PI * double(a) / double(d);
      }
    }
    return RewardPath::sinusoid(omega, phase, horizon);
  }
  if (spec.kind == "schedule") {
    if (!spec.csv) throw config_error("schedule adversary has no CSV content");
    RewardPath path = RewardPath::from_csv(*spec.csv, horizon);
    if (path.dim() != d) {
      throw config_error("schedule dimension " + std::to_string(path.dim()) +
                         " does not match d = " + std::to_string(d));
    }
    return path;
  }
  throw config_error("unknown adversary kind: " + spec.kind);
}

std::vector<std::pair<std::string, RewardPath>> builtin_adversaries(
    int d, double horizon) {
  std::vector<std::pair<std::string, RewardPath>> out;
  AdversarySpec constant;
  constant.kind = "constant";
  out.emplace_back("constant", make_reward_path(constant, d, horizon));
  AdversarySpec sinusoid;
  sinusoid.kind = "sinusoid";
  out.emplace_back("sinusoid", make_reward_path(sinusoid, d, horizon));

  // Two-piece schedule: the default ramp, then its reversal at T/2.
  RewardSchedule schedule;
  Vector ramp(d);
  for (int a = 0; a < d; ++a) ramp(a) = double(d - a) / double(d);
  schedule.breakpoints = {0.0, horizon / 2.0};
  schedule.values = {ramp, ramp.reverse()};
  out.emplace_back("two_piece",
                   RewardPath::piecewise(std::move(schedule), horizon));
  return out;
}

// ---------------------------------------------------------------------
// Experiment dispatch

namespace {

std::vector<Vector> round_rewards(const RewardPath& path, int t_rounds) {
  std::vector<Vector> rewards;
  rewards.reserve(std::size_t(t_rounds));
  for (int t = 0; t < t_rounds; ++t) rewards.push_back(path.eval(double(t)));
  return rewards;
}

void dump_trace_csv(const ExperimentConfig& cfg, int path_index,
                    const std::vector<double>& time, const Matrix& probs,
                    const Vector& expected) {
  std::ostringstream out;
  out.precision(17);
  out << "step,t";
  for (int a = 1; a <= int(probs.cols()); ++a) out << ",p_" << a;
  out << ",expected_reward\n";
  for (std::int64_t i = 0; i < std::int64_t(time.size()); ++i) {
    out << i << "," << time[std::size_t(i)];
    for (int a = 0; a < int(probs.cols()); ++a) out << "," << probs(i, a);
    out << "," << expected(i) << "\n";
  }
  write_text_file(cfg.output + "_trace_path" + std::to_string(path_index) +
                      ".csv",
                  out.str());
}

struct ExecutionResult {
  RegretReport report;
  RegretCurve curve;
};

ExecutionResult execute(const ExperimentConfig& cfg) {
  ExecutionResult result;
  const bool continuous = cfg.mode == "continuous";
  const double horizon = continuous ? cfg.horizon : double(cfg.t_rounds);
  const RewardPath path = make_reward_path(cfg.adversary, cfg.d, horizon);

  if (cfg.problem == "olo") {
    if (continuous) {
      const OloRunConfig run{cfg.d, cfg.horizon, Temperature(cfg.beta),
                             TimeGrid(cfg.horizon, cfg.steps), path};
      result.report = run_continuous_ftrl(run, &result.curve);
    } else {
      result.report =
          run_discrete_ftrl(cfg.d, cfg.t_rounds, Temperature(cfg.beta),
                            round_rewards(path, cfg.t_rounds), &result.curve);
    }
  } else if (cfg.problem == "bandit") {
    if (continuous) {
      const BanditRunConfig run{cfg.d,        cfg.horizon,
                                cfg.beta,     TimeGrid(cfg.horizon, cfg.steps),
                                path,         cfg.n_paths,
                                cfg.master_seed, cfg.p_floor,
                                cfg.workers};
      result.report = run_continuous_bandit(run, &result.curve);
      for (int p = 0; p < std::min(cfg.dump_traces, cfg.n_paths); ++p) {
        const auto trace = simulate_bandit_path(run, p);
        dump_trace_csv(cfg, p, trace.time, trace.probabilities,
                       trace.expected_reward);
      }
    } else {
      result.report = run_discrete_exp3(
          cfg.d, cfg.t_rounds, cfg.beta, round_rewards(path, cfg.t_rounds),
          cfg.n_paths, cfg.master_seed, &result.curve);
    }
  } else {
    if (!cfg.arms) throw config_error("linbandit config carries no arm set");
    if (continuous) {
      const LinBanditRunConfig run{*cfg.arms,    cfg.horizon,
                                   cfg.beta,     TimeGrid(cfg.horizon, cfg.steps),
                                   path,         cfg.n_paths,
                                   cfg.master_seed, cfg.p_floor,
                                   cfg.workers};
      result.report = run_continuous_linbandit(run, &result.curve);
      for (int p = 0; p < std::min(cfg.dump_traces, cfg.n_paths); ++p) {
        const auto trace = simulate_linbandit_path(run, p);
        dump_trace_csv(cfg, p, trace.time, trace.probabilities,
                       trace.expected_reward);
      }
    } else {
      const double gamma = cfg.gamma_is_auto
                               ? default_exploration_gamma(cfg.d, cfg.k,
                                                           cfg.t_rounds)
                               : cfg.gamma;
      result.report = run_discrete_linbandit(
          *cfg.arms, cfg.t_rounds, cfg.beta, gamma,
          round_rewards(path, cfg.t_rounds), cfg.n_paths, cfg.master_seed,
          &result.curve);
    }
  }
  return result;
}

ordered_json adversary_echo(const AdversarySpec& spec) {
  ordered_json j;
  j["kind"] = spec.kind;
  if (spec.values) j["values"] = *spec.values;
  if (spec.omega) j["omega"] = *spec.omega;
  if (spec.phase) j["phase"] = *spec.phase;
  if (spec.file) j["file"] = *spec.file;
  return j;
}

// The echo deliberately omits execution details (worker count) so that
// reports are byte-identical regardless of how they were scheduled.
ordered_json config_echo(const ExperimentConfig& cfg) {
  ordered_json j;
  j["problem"] = cfg.problem;
  j["mode"] = cfg.mode;
  j["d"] = cfg.d;
  if (cfg.problem == "linbandit") {
    j["k"] = cfg.k;
    if (cfg.arms_file) j["arms_file"] = *cfg.arms_file;
  }
  if (cfg.mode == "continuous") {
    j["T"] = cfg.horizon;
    j["steps"] = cfg.steps;
  } else {
    j["T_rounds"] = cfg.t_rounds;
  }
  j["beta"] = cfg.beta;
  j["beta_mode"] = cfg.beta_is_auto ? "auto" : "explicit";
  j["n_paths"] = cfg.n_paths;
  j["master_seed"] = cfg.master_seed;
  if (cfg.problem != "olo" && cfg.mode == "continuous") {
    j["p_floor"] = cfg.p_floor;
  }
  if (cfg.problem == "linbandit" && cfg.mode == "discrete") {
    j["gamma"] = cfg.gamma_is_auto
                     ? default_exploration_gamma(cfg.d, cfg.k, cfg.t_rounds)
                     : cfg.gamma;
  }
  j["adversary"] = adversary_echo(cfg.adversary);
  j["output"] = cfg.output;
  return j;
}

ordered_json report_json(const RegretReport& r) {
  ordered_json j;
  j["measured_regret"] = r.measured_regret;
  j["theoretical_bound"] = r.theoretical_bound;
  j["best_comparator_index"] = r.best_comparator_index;
  j["bound_violated"] = r.bound_violated;
  j["ci_halfwidth"] = r.ci_halfwidth;
  j["std_error"] = r.std_error;
  j["slack"] = r.slack;
  return j;
}

}  // namespace

RegretReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const ExecutionResult result = execute(cfg);
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  ordered_json j;
  j["problem"] = cfg.problem;
  j["mode"] = cfg.mode;
  j["report"] = report_json(result.report);
  j["config"] = config_echo(cfg);
  j["build"] = kBuildVersion;
  j["meta"] = ordered_json{{"wall_time_s", wall_s}};
  write_text_file(cfg.output + "_report.json", j.dump(2) + "\n");

  std::ostringstream curve;
  curve.precision(17);
  curve << "t,regret\n";
  for (std::size_t i = 0; i < result.curve.time.size(); ++i) {
    curve << result.curve.time[i] << "," << result.curve.regret[i] << "\n";
  }
  write_text_file(cfg.output + "_curve.csv", curve.str());

  return result.report;
}

std::string report_body_without_meta(const std::string& report_json_text) {
  ordered_json j = ordered_json::parse(report_json_text);
  j.erase("meta");
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------
// Verification suites

namespace {

struct SuiteRng {
  CounterRng rng;
  SuiteRng(std::uint64_t seed, std::uint64_t suite, std::uint64_t item)
      : rng({seed, suite, item}) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * rng.uniform01();
  }
  int uniform_int(int lo, int hi) {  // inclusive range
    return lo + int(rng.uniform01() * double(hi - lo + 1));
  }
  Vector simplex(int n) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      x(i) = -std::log(1.0 - rng.uniform01() + 1e-300);
    }
    return x / x.sum();
  }
  Vector box(int n, double lo, double hi) {
    Vector y(n);
    for (int i = 0; i < n; ++i) y(i) = uniform(lo, hi);
    return y;
  }
};

void update(SuiteResult& suite, double violation) {
  if (suite.cases == 0 || violation > suite.max_violation) {
    suite.max_violation = violation;
  }
  ++suite.cases;
}

SuiteResult legendre_grad_suite(std::uint64_t seed) {
  SuiteResult suite{"legendre_grad",
                    "grad_G is a simplex point and shift invariant"};
  for (long c = 0; c < 2000; ++c) {
    SuiteRng r(seed, 1, std::uint64_t(c));
    const int d = r.uniform_int(2, 16);
    const Temperature beta(r.uniform(0.05, 10.0));
    const Vector y = r.box(d, -5.0, 5.0);
    const Vector x = grad_G(y, beta);
    double v = std::abs(x.sum() - 1.0) - kSimplexTol;
    const Vector shifted = (y.array() + 3.7).matrix();
    v = std::max(v,
                 double((grad_G(shifted, beta) - x).cwiseAbs().maxCoeff()) -
                     1e-12);
    v = std::max(v, -double(x.minCoeff()));
    update(suite, v);
  }
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

SuiteResult legendre_hess_suite(std::uint64_t seed) {
  SuiteResult suite{"legendre_hess",
                    "hess_G PSD, rows sum 0, trace <= beta, matches FD"};
  for (long c = 0; c < 200; ++c) {
    SuiteRng r(seed, 2, std::uint64_t(c));
    const int d = r.uniform_int(2, 10);
    const double b = r.uniform(0.1, 5.0);
    const Temperature beta(b);
    const Vector y = r.box(d, -2.0 / b, 2.0 / b);
    const Matrix hess = hess_G(y, beta);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(hess);
    double v = -double(eig.eigenvalues().minCoeff()) - 1e-12;
    v = std::max(v, double((hess * Vector::Ones(d)).cwiseAbs().maxCoeff()) -
                        1e-12);
    v = std::max(v, double(hess.trace()) - b - 1e-12);
    if (c < 60) {
      const double step = 1e-5;
      Matrix fd(d, d);
      for (int j = 0; j < d; ++j) {
        Vector hi = y;
        Vector lo = y;
        hi(j) += step;
        lo(j) -= step;
        fd.col(j) = (grad_G(hi, beta) - grad_G(lo, beta)) / (2.0 * step);
      }
      const double rel = double((hess - fd).cwiseAbs().maxCoeff()) /
                         double(hess.cwiseAbs().maxCoeff());
      v = std::max(v, rel - 1e-5);
    }
    update(suite, v);
  }
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

SuiteResult fenchel_suite(std::uint64_t seed) {
  SuiteResult suite{"fenchel_gap",
                    "F(x) + G(y) - x.y >= -1e-10; conjugacy round trip"};
  for (long c = 0; c < 10000; ++c) {
    SuiteRng r(seed, 3, std::uint64_t(c));
    const int d = r.uniform_int(2, 16);
    const Temperature beta(r.uniform(0.05, 10.0));
    const Vector x = r.simplex(d);
    const Vector y = r.box(d, -5.0, 5.0);
    double v = -(fenchel_gap(x, y, beta)) - 1e-10;
    const Vector xs = grad_G(y, beta);
    v = std::max(v, std::abs(fenchel_gap(xs, y, beta)) - 1e-10);
    update(suite, v);
  }
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

SuiteResult bandit_covariance_suite(std::uint64_t seed) {
  SuiteResult suite{"bandit_covariance",
                    "Sigma equals enumeration covariance; E[r_hat] = r"};
  for (long c = 0; c < 1000; ++c) {
    SuiteRng r(seed, 4, std::uint64_t(c));
    const int d = r.uniform_int(2, 8);
    const double floor = 1e-3;
    const Vector p = floor_and_renormalize(r.simplex(d), floor);
    const Vector reward = r.box(d, 0.0, 1.0);
    const Matrix sigma = estimator_covariance(reward, p, floor);

    Matrix enumerated = -(reward * reward.transpose());
    for (int a = 0; a < d; ++a) {
      Vector r_hat = Vector::Zero(d);
      r_hat(a) = reward(a) / p(a);
      enumerated += p(a) * r_hat * r_hat.transpose();
    }
    double v = double((sigma - enumerated).cwiseAbs().maxCoeff()) - 1e-12;
    v = std::max(
        v, double(unbiasedness_check(reward, p).cwiseAbs().maxCoeff()) - 1e-13);
    update(suite, v);
  }
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

ArmSet random_spanning_arms(SuiteRng& r, int k, int d) {
  Matrix arms(k, d);
  for (int a = 0; a < d; ++a) {
    arms.row(a).setZero();
    arms(a, a) = 0.9;
  }
  for (int a = d; a < k; ++a) {
    Vector row = r.box(d, -1.0, 1.0);
    const double l1 = row.cwiseAbs().sum();
    arms.row(a) = (row / std::max(l1, 1.0) * r.uniform(0.3, 1.0)).transpose();
  }
  return ArmSet(std::move(arms));
}

SuiteResult linbandit_covariance_suite(std::uint64_t seed) {
  SuiteResult suite{"linbandit_covariance",
                    "Sigma equals enumeration; Q identities; E[r_hat] = r"};
  for (long c = 0; c < 300; ++c) {
    SuiteRng r(seed, 5, std::uint64_t(c));
    const int d = r.uniform_int(2, 8);
    const int k = r.uniform_int(d, 64);
    const ArmSet arms = random_spanning_arms(r, k, d);
    const double floor = std::min(1e-3, 0.2 / double(k));
    const Vector p = floor_and_renormalize(r.simplex(k), floor);
    const Vector reward = r.box(d, 0.0, 1.0);

    const Matrix q = design_matrix_Q(arms, p);
    Matrix q_enum = Matrix::Zero(d, d);
    for (int a = 0; a < k; ++a) {
      q_enum += p(a) * arms.arm(a) * arms.arm(a).transpose();
    }
    double v = double((q - q_enum).cwiseAbs().maxCoeff()) - 1e-12;

    const Matrix sigma = linear_estimator_covariance(arms, p, reward);
    Matrix enumerated = -(reward * reward.transpose());
    const Eigen::FullPivLU<Matrix> lu(q);
    for (int a = 0; a < k; ++a) {
      const Vector r_hat =
          lu.solve(arms.arm(a)) * arms.arm(a).dot(reward);
      enumerated += p(a) * r_hat * r_hat.transpose();
    }
    v = std::max(v, double((sigma - enumerated).cwiseAbs().maxCoeff()) - 1e-10);
    v = std::max(v,
                 double(linear_unbiasedness_check(arms, p, reward)
                            .cwiseAbs()
                            .maxCoeff()) -
                     1e-9);
    update(suite, v);
  }
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

SuiteResult qv_linbandit_suite(std::uint64_t seed) {
  SuiteResult suite{"qv_linbandit",
                    "0 <= tr(A Sigma A' hess_G)/2 <= beta d/2 + 1e-9"};
  for (long c = 0; c < 10000; ++c) {
    SuiteRng r(seed, 7, std::uint64_t(c));
    const int d = r.uniform_int(2, 8);
    const int k = r.uniform_int(d, 32);
    const ArmSet arms = random_spanning_arms(r, k, d);
    const double floor = std::min(1e-3, 0.2 / double(k));
    const Vector p = floor_and_renormalize(r.simplex(k), floor);
    const Vector reward = r.box(d, 0.0, 1.0);
    const double beta = r.uniform(0.01, 10.0);
    const double qv = quadratic_variation_check_linear(arms, p, reward, beta);
    update(suite, std::max(qv - (beta * double(d) / 2.0 + 1e-9),
                           -qv - 1e-9));
  }
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

SuiteResult olo_bound_suite() {
  SuiteResult suite{"olo_bound", "continuous FTRL regret <= ln(d)/beta + slack"};
  const double horizon = 5.0;
  for (const int d : {2, 10, 32}) {
    for (const double beta : {1.0, 10.0, 100.0}) {
      for (const auto& [name, path] : builtin_adversaries(d, horizon)) {
        (void)name;
        const OloRunConfig cfg{d, horizon, Temperature(beta),
                               TimeGrid(horizon, 20000), path};
        const RegretReport report = run_continuous_ftrl(cfg);
        update(suite, report.measured_regret -
                          (report.theoretical_bound + report.slack));
      }
    }
  }
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

SuiteResult bandit_bound_suite(std::uint64_t seed) {
  SuiteResult suite{"bandit_bound",
                    "bandit regret - 3 se <= sqrt(2Td ln d) + slack"};
  const int d = 3;
  const double horizon = 5.0;
  Vector values(d);
  values << 1.0, 0.5, 0.0;
  const BanditRunConfig cfg{d,
                            horizon,
                            beta_schedule_bandit(d, horizon),
                            TimeGrid(horizon, 5000),
                            RewardPath::constant(values, horizon),
                            300,
                            seed,
                            1e-6,
                            0};
  const RegretReport report = run_continuous_bandit(cfg);
  update(suite, (report.measured_regret - 3.0 * report.std_error) -
                    (report.theoretical_bound + report.slack));
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

SuiteResult linbandit_bound_suite(std::uint64_t seed) {
  SuiteResult suite{"linbandit_bound",
                    "linbandit regret - 3 se <= sqrt(2Td ln k) + slack"};
  SuiteRng r(seed, 8, 0);
  const int d = 3;
  const int k = 8;
  const ArmSet arms = random_spanning_arms(r, k, d);
  const double horizon = 5.0;
  Vector values(d);
  values << 1.0, 0.5, 0.25;
  const LinBanditRunConfig cfg{arms,
                               horizon,
                               beta_schedule_linbandit(d, k, horizon),
                               TimeGrid(horizon, 5000),
                               RewardPath::constant(values, horizon),
                               200,
                               seed,
                               1e-6,
                               0};
  const RegretReport report = run_continuous_linbandit(cfg);
  update(suite, (report.measured_regret - 3.0 * report.std_error) -
                    (report.theoretical_bound + report.slack));
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

}  // namespace

SuiteResult run_qv_bandit_suite(long cases, std::uint64_t seed,
                                const BanditCovarianceFn& covariance) {
  SuiteResult suite{"qv_bandit", "0 <= tr(Sigma hess_G)/2 <= beta d/2 + 1e-9"};
  for (long c = 0; c < cases; ++c) {
    SuiteRng r(seed, 6, std::uint64_t(c));
    const int d = r.uniform_int(2, 32);
    const double floor = 1e-4;
    const Vector p = floor_and_renormalize(r.simplex(d), floor);
    const Vector reward = r.box(d, 0.0, 1.0);
    const double beta = r.uniform(0.01, 10.0);
    const Matrix sigma = covariance(reward, p, floor);
    const double qv =
        0.5 * (sigma * hess_G_at(p, Temperature(beta))).trace();
    // Both factors are PSD, so the trace is nonnegative; a sign error in
    // Sigma fails the lower side.
    update(suite, std::max(qv - (beta * double(d) / 2.0 + 1e-9),
                           -qv - 1e-9));
  }
  suite.passed = suite.max_violation <= 0.0;
  return suite;
}

VerifySummary run_verify_suite(std::ostream& out, std::uint64_t master_seed) {
  VerifySummary summary;
  summary.suites.push_back(legendre_grad_suite(master_seed));
  summary.suites.push_back(legendre_hess_suite(master_seed));
  summary.suites.push_back(fenchel_suite(master_seed));
  summary.suites.push_back(bandit_covariance_suite(master_seed));
  summary.suites.push_back(linbandit_covariance_suite(master_seed));
  summary.suites.push_back(
      run_qv_bandit_suite(10000, master_seed, estimator_covariance));
  summary.suites.push_back(qv_linbandit_suite(master_seed));
  summary.suites.push_back(olo_bound_suite());
  summary.suites.push_back(bandit_bound_suite(master_seed));
  summary.suites.push_back(linbandit_bound_suite(master_seed));

  out << std::left << std::setw(24) << "suite" << std::right << std::setw(8)
      << "cases" << std::setw(16) << "max violation" << "  verdict\n";
  for (const auto& suite : summary.suites) {
    summary.all_passed = summary.all_passed && suite.passed;
    out << std::left << std::setw(24) << suite.name << std::right
        << std::setw(8) << suite.cases << std::setw(16) << std::scientific
        << std::setprecision(3) << suite.max_violation
        << (suite.passed ? "  PASS" : "  FAIL") << "\n";
    if (!suite.passed) {
      out << "    failed inequality: " << suite.inequality << "\n";
    }
  }
  out << (summary.all_passed ? "all suites passed\n" : "some suites FAILED\n");
  return summary;
}

// ---------------------------------------------------------------------
// Sweeps

SweepTable run_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep) {
  static const std::set<std::string> kParams = {"beta", "T", "d", "steps",
                                                "p_floor"};
  if (!kParams.count(sweep.parameter)) {
    throw config_error("sweep parameter must be one of beta, T, d, steps, p_floor");
  }
  if (sweep.values.empty()) {
    throw config_error("sweep requires at least one value");
  }

  SweepTable table;
  table.parameter = sweep.parameter;
  for (const double value : sweep.values) {
    SweepRow row;
    row.value = value;
    try {
      ExperimentConfig run = cfg;
      if (sweep.parameter == "beta") {
        if (!(value > 0.0)) throw config_error("beta must be positive");
        run.beta = value;
        run.beta_is_auto = false;
      } else if (sweep.parameter == "T") {
        if (run.mode == "continuous") {
          run.horizon = value;
        } else {
          if (value != std::floor(value) || value < 1.0) {
            throw config_error("T_rounds values must be positive integers");
          }
          run.t_rounds = int(value);
        }
      } else if (sweep.parameter == "d") {
        if (run.problem == "linbandit") {
          throw config_error("d is fixed by the arm set");
        }
        if (value != std::floor(value) || value < 1.0) {
          throw config_error("d values must be positive integers");
        }
        run.d = int(value);
      } else if (sweep.parameter == "steps") {
        if (run.mode != "continuous") {
          throw config_error("steps only applies to continuous mode");
        }
        if (value != std::floor(value) || value < 1.0) {
          throw config_error("steps values must be positive integers");
        }
        run.steps = std::int64_t(value);
        run.steps_is_auto = false;
      } else {  // p_floor
        run.p_floor = value;
      }
      resolve_auto_fields(run);
      validate_config(run);
      const ExecutionResult result = execute(run);
      row.regret = result.report.measured_regret;
      row.std_error = result.report.std_error;
      row.bound = result.report.theoretical_bound;
      row.violated = result.report.bound_violated;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string sweep_table_csv(const SweepTable& table) {
  std::ostringstream out;
  out.precision(17);
  out << "value,regret,stderr,bound,violated,error\n";
  for (const auto& row : table.rows) {
    out << row.value << ",";
    if (row.error.empty()) {
      out << row.regret << "," << row.std_error << "," << row.bound << ","
          << (row.violated ? "true" : "false") << ",";
    } else {
      std::string sanitized = row.error;
      for (char& ch : sanitized) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      out << ",,,," << sanitized;
    }
    out << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace regretsim

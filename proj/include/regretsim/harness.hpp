#ifndef REGRETSIM_HARNESS_HPP
#define REGRETSIM_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regretsim/linbandit.hpp"
#include "regretsim/olo.hpp"
#include "regretsim/report.hpp"
#include "regretsim/rewards.hpp"

// Experiment orchestration: JSON config parsing, dispatch to the
// problem runners, bound-verification suites, parameter sweeps, and
// CSV/JSON artifact writing.

namespace regretsim {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdversarySpec {
  std::string kind;  // constant | sinusoid | schedule
  std::optional<std::vector<double>> values;
  std::optional<std::vector<double>> omega;
  std::optional<std::vector<double>> phase;
  std::optional<std::string> file;  // schedule CSV on disk
  std::optional<std::string> csv;   // inline schedule CSV
};

struct ExperimentConfig {
  std::string problem;  // olo | bandit | linbandit
  std::string mode;     // continuous | discrete
  int d = 0;
  int k = 0;  // number of arms (linbandit only)
  double horizon = 0.0;
  int t_rounds = 0;
  double beta = 0.0;
  bool beta_is_auto = false;
  std::int64_t steps = 0;
  bool steps_is_auto = true;
  int n_paths = 1000;
  std::uint64_t master_seed = 0;
  double p_floor = 1e-6;
  double gamma = 0.0;
  bool gamma_is_auto = true;
  AdversarySpec adversary;
  std::optional<std::string> arms_file;
  std::optional<ArmSet> arms;
  std::string output = "run";
  int workers = 0;
  int dump_traces = 0;  // leading paths to dump as per-step CSV traces
};

// Parses and validates a JSON config; resolves "auto" beta to the
// problem's schedule, applies defaults (steps = 1e4 * T, n_paths = 1000,
// p_floor = 1e-6), and loads referenced files. Throws config_error with
// the offending field named.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);

// Builds the reward path an AdversarySpec describes; generator parameters
// omitted in the config get d-dependent defaults.
RewardPath make_reward_path(const AdversarySpec& spec, int d, double horizon);

// Named built-in adversaries at dimension d: one per generator kind.
std::vector<std::pair<std::string, RewardPath>> builtin_adversaries(
    int d, double horizon);

// Runs the configured experiment and writes <output>_report.json and
// <output>_curve.csv. The report body is reproducible byte for byte for
// a fixed (config, master_seed, build); volatile fields (wall time)
// live under the "meta" key.
RegretReport run_experiment(const ExperimentConfig& cfg);

// Report JSON with the volatile "meta" subtree removed; two runs of the
// same config compare equal on this form.
std::string report_body_without_meta(const std::string& report_json);

struct SuiteResult {
  std::string name;
  std::string inequality;  // the property being checked, for diagnostics
  long cases = 0;
  double max_violation = 0.0;  // positive values are failures
  bool passed = true;
};

struct VerifySummary {
  std::vector<SuiteResult> suites;
  bool all_passed = true;
};

// Runs every invariant suite at desk scale and prints one table row per
// suite. Verdicts are stable under seed changes (Monte Carlo suites use
// confidence allowances). Failures are reported, not thrown.
VerifySummary run_verify_suite(std::ostream& out,
                               std::uint64_t master_seed = 0);

// Covariance-builder signature used by the quadratic-variation suite;
// injectable so a corrupted builder can prove the suite catches sign
// errors.
using BanditCovarianceFn =
    std::function<Matrix(const Vector& r, const Vector& p, double p_floor)>;

SuiteResult run_qv_bandit_suite(long cases, std::uint64_t seed,
                                const BanditCovarianceFn& covariance);

struct SweepSpec {
  std::string parameter;  // beta | T | d | steps | p_floor
  std::vector<double> values;
};

struct SweepRow {
  double value = 0.0;
  double regret = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool violated = false;
  std::string error;  // empty on success
};

struct SweepTable {
  std::string parameter;
  std::vector<SweepRow> rows;
};

// One run per value; rows that fail record the error and the sweep
// continues. Auto-resolved fields (beta, steps, gamma) are re-derived
// for each value.
SweepTable run_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep);

// Columns: value,regret,stderr,bound,violated,error.
std::string sweep_table_csv(const SweepTable& table);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace regretsim

#endif  // REGRETSIM_HARNESS_HPP

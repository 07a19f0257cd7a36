#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "regretsim/harness.hpp"

// Exit codes: 0 success, 1 bound violation in verify mode, 2 config
// error, 3 runtime error.

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<std::int64_t> steps;
  std::optional<std::string> out;
  std::optional<int> workers;
};

void apply(const Overrides& o, regretsim::ExperimentConfig& cfg) {
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.paths) cfg.n_paths = *o.paths;
  if (o.steps) {
    if (cfg.mode != "continuous") {
      throw regretsim::config_error("--steps only applies to continuous mode");
    }
    cfg.steps = *o.steps;
    cfg.steps_is_auto = false;
  }
  if (o.out) cfg.output = *o.out;
  if (o.workers) cfg.workers = *o.workers;
}

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Override master_seed");
  cmd->add_option("--paths", o.paths, "Override n_paths");
  cmd->add_option("--steps", o.steps, "Override steps (continuous mode)");
  cmd->add_option("--out", o.out, "Override output prefix");
  cmd->add_option("--workers", o.workers, "Worker threads (0 = hardware)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous- and discrete-time online learning simulator"};
  app.require_subcommand(1);

  std::string run_config_path;
  Overrides run_overrides;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment from a JSON config");
  run_cmd->add_option("config", run_config_path, "Path to the JSON config")
      ->required();
  add_override_flags(run_cmd, run_overrides);

  std::uint64_t verify_seed = 0;
  auto* verify_cmd =
      app.add_subcommand("verify", "Run every invariant and bound suite");
  verify_cmd->add_option("--seed", verify_seed, "Master seed for the suites");

  std::string sweep_config_path;
  std::string sweep_param;
  std::vector<double> sweep_values;
  Overrides sweep_overrides;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run one experiment per parameter value");
  sweep_cmd->add_option("config", sweep_config_path, "Path to the JSON config")
      ->required();
  sweep_cmd
      ->add_option("--param", sweep_param,
                   "Parameter to sweep: beta, T, d, steps, p_floor")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  add_override_flags(sweep_cmd, sweep_overrides);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      regretsim::ExperimentConfig cfg;
      try {
        cfg = regretsim::parse_config_file(run_config_path);
        apply(run_overrides, cfg);
      } catch (const regretsim::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
      const auto report = regretsim::run_experiment(cfg);
      std::cout << "measured_regret   " << report.measured_regret << "\n"
                << "theoretical_bound " << report.theoretical_bound << "\n"
                << "ci_halfwidth      " << report.ci_halfwidth << "\n"
                << "bound_violated    "
                << (report.bound_violated ? "true" : "false") << "\n"
                << "artifacts         " << cfg.output << "_report.json, "
                << cfg.output << "_curve.csv\n";
      return 0;
    }

    if (*verify_cmd) {
      const auto summary = regretsim::run_verify_suite(std::cout, verify_seed);
      return summary.all_passed ? 0 : 1;
    }

    if (*sweep_cmd) {
      regretsim::ExperimentConfig cfg;
      regretsim::SweepTable table;
      try {
        cfg = regretsim::parse_config_file(sweep_config_path);
        apply(sweep_overrides, cfg);
        table = regretsim::run_sweep(cfg, {sweep_param, sweep_values});
      } catch (const regretsim::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
      const std::string csv = regretsim::sweep_table_csv(table);
      const std::string path = cfg.output + "_sweep.csv";
      regretsim::write_text_file(path, csv);
      std::cout << csv << "wrote " << path << "\n";
      return 0;
    }
  } catch (const regretsim::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

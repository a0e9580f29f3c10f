#pragma once

#include <string>
#include <vector>

#include "fedsim/sim_config.hpp"

namespace fedsim {

enum class ExperimentKind { train, finetune, lowerbound, concentration, sweep };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// Everything a single `sim` invocation needs, resolved from a flat
/// key=value config file plus command-line overrides.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::train;
  SimConfig sim;
  std::string out_dir = ".";

  // Planted initial distance; doubles as the lower-bound experiment's delta0.
  std::optional<double> delta0;

  // Fine-tuning sweeps.
  std::size_t trials = 10;
  std::vector<std::size_t> n_values = {5, 10, 25, 50};
  double alpha_ft = 0.01;
  std::size_t tau_prime = 200;
  double noise_sigma_ft = 0.1;

  // Concentration harness.
  std::size_t conc_d = 20;
  std::size_t conc_d1 = 5;
  std::size_t conc_d2 = 5;
  std::vector<std::size_t> conc_b_values = {100, 1000, 10000};
  std::vector<std::size_t> conc_m_values = {1, 10, 100};
  std::size_t conc_b = 100;
  std::size_t conc_trials = 50;
  std::size_t event_m = 0;  // 0 = use the analytic participation threshold
  std::size_t event_rounds = 10;
  std::size_t event_trials = 10000;
  double event_alpha = 0.3;
};

/// Strict parse of the flat key=value format ('#' starts a comment). Unknown
/// or duplicate keys raise ParseError with line context; absent keys take the
/// documented defaults.
ExperimentConfig parse_config(const std::string& text);

/// Runs the configured experiment, writing <kind>.csv and summary.json under
/// out_dir. Returns 0 on success and 2 if training diverged. Config errors
/// surface as exceptions (the CLI maps them to exit 1).
int run_experiment(const ExperimentConfig& config);

}  // namespace fedsim

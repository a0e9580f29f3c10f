#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fedsim/problem.hpp"

namespace fedsim {

enum class RegimeKind { population, finite_sample };

struct Regime {
  RegimeKind kind = RegimeKind::population;
  std::size_t batch_size = 0;  // finite-sample only

  static Regime population() { return {RegimeKind::population, 0}; }
  static Regime finite_sample(std::size_t b) { return {RegimeKind::finite_sample, b}; }
};

/// Constants of the monitored induction hypotheses. Defaults are the
/// explicit values of the convergence analysis; overridable per run.
struct MonitorConstants {
  double c3 = 4800.0;
  double rate_const = 0.04;
};

/// How much per-round instrumentation to compute. `global` skips the
/// per-local-step checks (which dominate metric cost), `none` skips
/// metrics entirely.
enum class MonitorLevel { none, global, full };

/// Full description of one training experiment.
struct SimConfig {
  std::size_t d = 100;
  std::size_t k = 5;
  std::size_t num_clients = 40;      // M
  std::size_t clients_per_round = 40;  // m
  std::size_t tau = 2;
  double alpha = 0.4;
  std::size_t rounds = 2000;  // T
  Regime regime = Regime::population();
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> delta0_target;
  MonitorConstants monitor_constants;
  MonitorLevel monitor_level = MonitorLevel::full;

  void validate() const;
};

/// The tau+1 states of one client within one round; states[0] is the round's
/// incoming global state.
struct LocalTrajectory {
  std::size_t client = 0;
  std::vector<ModelState> states;
};

}  // namespace fedsim

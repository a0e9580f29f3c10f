#pragma once

#include <cstdint>
#include <vector>

#include "fedsim/monitors.hpp"
#include "fedsim/problem.hpp"
#include "fedsim/sim_config.hpp"

namespace fedsim {

/// One exact local gradient step on f_i(B, w) = 1/2 ||Bw - target||^2, with
/// both blocks evaluated at the incoming state (simultaneous update).
/// `target` is the client's ground-truth regressor B_* w_{*,i}.
ModelState local_step_population(const ModelState& state, const Vector& target,
                                 double alpha);

/// One mini-batch gradient step on the empirical loss (1/2b) ||y - X B w||^2,
/// simultaneous update of both blocks.
ModelState local_step_finite(const ModelState& state, const Batch& batch,
                             double alpha);

/// Runs tau local steps of the configured regime for one client, starting
/// from `start`. Finite-sample mode draws a fresh batch per step from the
/// stream keyed by (seed, t, i, s).
LocalTrajectory run_local(const ModelState& start, const GroundTruth& gt,
                          std::size_t client, std::size_t tau, std::size_t round_t,
                          const SimConfig& config);

/// m distinct client indices, uniform without replacement, sorted.
/// Deterministic given (seed, round_t). Throws InvalidSampleSizeError.
std::vector<std::size_t> sample_clients(std::size_t num_clients, std::size_t m,
                                        std::size_t round_t, std::uint64_t seed);

/// Context threaded through consecutive rounds so per-round metrics can see
/// the initial alignment and the previous round's perpendicular energy.
struct MonitorContext {
  double e0 = 0.0;
  double prev_perp = 0.0;
  double prev_dist = 0.0;
  DiversityStats stats;
};

struct RoundOutcome {
  ModelState state;
  RoundMetrics metrics;
};

/// One FedAvg round: samples clients, runs their local updates (in parallel
/// when SIM_THREADS allows), and averages with equal weights in fixed index
/// order so the result is independent of execution order. Metrics for the
/// post-round state are computed per config.monitor_level; when `ctx` is
/// null a standalone context is derived from the incoming state.
RoundOutcome global_round(const ModelState& state, const GroundTruth& gt,
                          std::size_t round_t, const SimConfig& config,
                          MonitorContext* ctx = nullptr);

struct TrainResult {
  ModelState state;
  std::vector<RoundMetrics> metrics;
  bool diverged = false;
  std::size_t rounds_completed = 0;
  double dist0 = 0.0;
  double e0 = 0.0;
};

/// Runs T rounds on a given instance and initialization. Aborts with
/// diverged = true (and the metrics recorded so far) if any model entry
/// exceeds 1e12 in magnitude or stops being finite.
TrainResult run_training(const SimConfig& config, const GroundTruth& gt,
                         const ModelState& init);

/// Convenience wrapper that generates the instance and the initialization
/// from the config (seed, dimensions, delta0_target).
TrainResult run_training(const SimConfig& config);

struct FineTuneParams {
  std::size_t tau_prime = 200;
  double alpha_ft = 0.01;
  std::size_t batch_size = 0;  // n; the batch is drawn once and reused
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

/// Per-step squared product error ||B_s w_s - B_* w_new||^2 during adaptation
/// of a pretrained model to a new client; entry 0 is the pre-adaptation error.
struct FineTuneTrace {
  std::vector<double> product_error_sq;
  double final_error_sq() const { return product_error_sq.back(); }
};

/// Adapts `pretrained` to a new client with head `new_head`: draws one batch
/// of `params.batch_size` samples with noise `params.noise_sigma`, then runs
/// tau_prime full-batch gradient steps on both blocks.
FineTuneTrace finetune(const ModelState& pretrained, const GroundTruth& gt,
                       const Vector& new_head, const FineTuneParams& params);

}  // namespace fedsim

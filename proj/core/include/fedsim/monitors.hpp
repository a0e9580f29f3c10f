#pragma once

#include <span>
#include <vector>

#include "fedsim/problem.hpp"
#include "fedsim/sim_config.hpp"

namespace fedsim {

/// Per-round truth values of the monitored induction hypotheses.
/// `applicable` is false when mu == 0: the bounds involve kappa_max = inf and
/// hold vacuously, so the flags carry no information in that case.
struct HypFlags {
  bool a1 = true, a2 = true, a3 = true, a4 = true, a5 = true;
  bool a1_loc = true, a2_loc = true, a3_loc = true, a4_loc = true;
  bool applicable = true;
};

/// Everything observed about one round. `t` counts post-round states, i.e.
/// t = 1 is the state after the first round. The *_worst fields keep the raw
/// quantities behind the flags so trajectory-level checks can re-derive them.
struct RoundMetrics {
  std::size_t t = 0;
  double dist = 0.0;              // principal angle distance to B_*
  double delta_norm = 0.0;        // || I_k - alpha B_t^T B_t ||_2
  double w_norm = 0.0;
  double grad_norm_global = 0.0;  // gradient norm of the population global loss
  HypFlags flags;
  double prior_weight_measured = 0.0;
  double prior_weight_predicted = 0.0;
  double e0 = 0.0;  // 1 - dist_0^2, from the measured initial distance

  double perp_norm = 0.0;       // || B_{*,perp}^T B_t ||_2
  double perp_norm_prev = 0.0;  // same quantity one round earlier
  double a1_residual = 0.0;     // || w_t - alpha (I + Delta_t) B_t^T B_* wbar_{*,t} ||
  double a1_loc_worst = 0.0;    // worst local-head residual this round
  double a2_loc_worst = 0.0;    // worst local head norm
  double a3_loc_worst = 0.0;    // worst local Delta norm
  double a4_loc_worst = 0.0;    // worst dist(B_{t,i,s}, B_*) / dist_t
};

/// Bounds of the hypothesis ladder for a given instance and step size.
struct HypothesisBounds {
  double a1_global = 0.0;  // 91 alpha^2.5 tau L^3
  double a2_global = 0.0;  // 2 sqrt(alpha) L
  double a3_global = 0.0;  // c3 alpha^2 tau L^2 kappa^2 / E0
  double rate = 0.0;       // rate_const * alpha^2 tau mu^2 E0
  double a1_local = 0.0;   // 4 c3 alpha^2.5 tau L^3 kappa^2 / E0
  double a2_local = 0.0;   // 2 sqrt(alpha) L
  double a3_local = 0.0;   // 2 c3 alpha^2 tau L^2 kappa^2 / E0
  double a4_local = 1.1;   // dist ratio cap
  bool applicable = true;  // false when mu == 0
};

HypothesisBounds hypothesis_bounds(const DiversityStats& stats,
                                   const SimConfig& config, double e0);

/// Gradient norm of the population global objective at (B, w):
/// sqrt(||B^T (Bw - B_* w_bar)||^2 + ||(Bw - B_* w_bar) w^T||_F^2).
double global_grad_norm(const ModelState& state, const GroundTruth& gt);

struct GlobalHypothesisReport {
  bool a1 = true, a2 = true, a3 = true, a4 = true, a5 = true;
  bool applicable = true;
  /// Largest over rounds of (observed / bound); > 1 means a violation.
  double a1_worst_ratio = 0.0, a2_worst_ratio = 0.0, a3_worst_ratio = 0.0;
  double a4_worst_ratio = 0.0, a5_worst_ratio = 0.0;
};

/// Re-checks the global hypothesis ladder over a recorded trajectory: each
/// flag is true iff its inequality holds at every recorded round.
GlobalHypothesisReport check_global_hypotheses(std::span<const RoundMetrics> trajectory,
                                               const DiversityStats& stats,
                                               const SimConfig& config);

struct LocalHypothesisReport {
  bool a1 = true, a2 = true, a3 = true, a4 = true;
  bool applicable = true;
  double a1_worst = 0.0;        // worst residual norm
  double a2_worst = 0.0;        // worst head norm
  double a3_worst = 0.0;        // worst Delta norm
  double a4_worst_ratio = 0.0;  // worst dist ratio vs round start
};

/// Checks the local hypothesis ladder for one round's trajectories against
/// the round's starting distance `dist_t`; bounds use the run's initial
/// alignment `e0` (1 - dist_0^2).
LocalHypothesisReport check_local_hypotheses(std::span<const LocalTrajectory> trajectories,
                                             const GroundTruth& gt, double dist_t,
                                             double e0, const DiversityStats& stats,
                                             const SimConfig& config);

struct PriorWeightDiag {
  double measured = 0.0;   // || (1/m) sum_i prod_s (I - alpha w_{t,i,s} w_{t,i,s}^T) ||_2
  double predicted = 0.0;  // 1 - alpha sigma_min^2(B_*^T B_t) mu_hat^2
};

/// The spectral norm of the round's averaged local-head contraction product,
/// next to its closed-form approximation. A recorded diagnostic: the
/// approximation is only claimed tight when the predicted contraction is
/// far from 1. Population regime only.
///
/// Throws DegenerateHeadError if any sampled head has zero norm.
PriorWeightDiag prior_weight_diagnostics(std::span<const LocalTrajectory> trajectories,
                                         const Matrix& b_t, const Matrix& b_star,
                                         double alpha,
                                         std::span<const Vector> sampled_heads);

}  // namespace fedsim

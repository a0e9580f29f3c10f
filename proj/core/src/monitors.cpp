#include "fedsim/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedsim/errors.hpp"

namespace fedsim {

namespace {

/// || I_k - alpha B^T B ||_2
double delta_norm_of(const Matrix& b, double alpha) {
  Matrix delta = gram(b);
  for (std::size_t i = 0; i < delta.rows() * delta.cols(); ++i)
    delta.data()[i] = -alpha * delta.data()[i];
  for (std::size_t i = 0; i < delta.rows(); ++i) delta(i, i) += 1.0;
  return spectral_norm(delta);
}

}  // namespace

HypothesisBounds hypothesis_bounds(const DiversityStats& stats,
                                   const SimConfig& config, double e0) {
  const double alpha = config.alpha;
  const double tau = static_cast<double>(config.tau);
  const double l = stats.l_max;
  const double c3 = config.monitor_constants.c3;
  const double inf = std::numeric_limits<double>::infinity();

  HypothesisBounds b;
  b.applicable = stats.mu > 0.0;
  b.a1_global = 91.0 * std::pow(alpha, 2.5) * tau * l * l * l;
  b.a2_global = 2.0 * std::sqrt(alpha) * l;
  b.a2_local = b.a2_global;
  if (b.applicable && e0 > 0.0) {
    const double kappa_sq = stats.kappa_max * stats.kappa_max;
    b.a3_global = c3 * alpha * alpha * tau * l * l * kappa_sq / e0;
    b.a1_local = 4.0 * c3 * std::pow(alpha, 2.5) * tau * l * l * l * kappa_sq / e0;
    b.a3_local = 2.0 * b.a3_global;
    b.rate = config.monitor_constants.rate_const * alpha * alpha * tau *
             stats.mu * stats.mu * e0;
  } else {
    b.a3_global = inf;
    b.a1_local = inf;
    b.a3_local = inf;
    b.rate = 0.0;
  }
  return b;
}

double global_grad_norm(const ModelState& state, const GroundTruth& gt) {
  const Vector residual = sub(matvec(state.b, state.w), gt.mean_regressor());
  const Vector w_block = tmatvec(state.b, residual);
  // ||residual w^T||_F = ||residual|| * ||w||
  const double b_block = norm(residual) * norm(state.w);
  return std::sqrt(dot(w_block, w_block) + b_block * b_block);
}

GlobalHypothesisReport check_global_hypotheses(std::span<const RoundMetrics> trajectory,
                                               const DiversityStats& stats,
                                               const SimConfig& config) {
  if (trajectory.empty())
    throw DimensionError("check_global_hypotheses: empty trajectory");

  const double e0 = trajectory.front().e0;
  const HypothesisBounds bounds = hypothesis_bounds(stats, config, e0);

  GlobalHypothesisReport report;
  report.applicable = bounds.applicable;
  auto track = [](bool& flag, double& worst, double observed, double bound) {
    const double ratio = bound > 0.0 ? observed / bound
                                     : (observed > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    worst = std::max(worst, ratio);
    if (observed > bound) flag = false;
  };

  for (const RoundMetrics& m : trajectory) {
    track(report.a1, report.a1_worst_ratio, m.a1_residual, bounds.a1_global);
    track(report.a2, report.a2_worst_ratio, m.w_norm, bounds.a2_global);
    track(report.a3, report.a3_worst_ratio, m.delta_norm, bounds.a3_global);
    track(report.a4, report.a4_worst_ratio, m.perp_norm,
          (1.0 - bounds.rate) * m.perp_norm_prev);
    track(report.a5, report.a5_worst_ratio, m.dist,
          std::pow(1.0 - bounds.rate, static_cast<double>(m.t) - 1.0));
  }
  return report;
}

LocalHypothesisReport check_local_hypotheses(std::span<const LocalTrajectory> trajectories,
                                             const GroundTruth& gt, double dist_t,
                                             double e0, const DiversityStats& stats,
                                             const SimConfig& config) {
  const HypothesisBounds bounds = hypothesis_bounds(stats, config, e0);

  LocalHypothesisReport report;
  report.applicable = bounds.applicable;
  for (const LocalTrajectory& traj : trajectories) {
    const Vector target = gt.regressor(traj.client);
    for (std::size_t s = 1; s < traj.states.size(); ++s) {
      const ModelState& prev = traj.states[s - 1];
      const ModelState& cur = traj.states[s];
      // || w_{t,i,s} - alpha B_{t,i,s-1}^T B_* w_{*,i} ||
      Vector residual = cur.w;
      add_scaled(residual, -config.alpha, tmatvec(prev.b, target));
      report.a1_worst = std::max(report.a1_worst, norm(residual));

      report.a2_worst = std::max(report.a2_worst, norm(cur.w));
      report.a3_worst = std::max(report.a3_worst, delta_norm_of(cur.b, config.alpha));
      const double local_dist = principal_angle_distance(cur.b, gt.b_star);
      const double ratio = dist_t > 0.0
                               ? local_dist / dist_t
                               : (local_dist > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      report.a4_worst_ratio = std::max(report.a4_worst_ratio, ratio);
    }
  }
  report.a1 = report.a1_worst <= bounds.a1_local;
  report.a2 = report.a2_worst <= bounds.a2_local;
  report.a3 = report.a3_worst <= bounds.a3_local;
  report.a4 = report.a4_worst_ratio <= bounds.a4_local;
  return report;
}

PriorWeightDiag prior_weight_diagnostics(std::span<const LocalTrajectory> trajectories,
                                         const Matrix& b_t, const Matrix& b_star,
                                         double alpha,
                                         std::span<const Vector> sampled_heads) {
  const std::size_t k = b_t.cols();
  const double inv_m = 1.0 / static_cast<double>(trajectories.size());

  Matrix averaged(k, k);
  for (const LocalTrajectory& traj : trajectories) {
    Matrix product = Matrix::identity(k);
    // Product over the round's local steps s = 0..tau-1, applied on the right
    // in step order, matching the one-round update of the representation.
    for (std::size_t s = 0; s + 1 < traj.states.size(); ++s) {
      const Vector& w = traj.states[s].w;
      Matrix factor = Matrix::identity(k);
      rank_one_update(factor, -alpha, w, w);
      product = matmul(product, factor);
    }
    add_scaled(averaged, inv_m, product);
  }

  PriorWeightDiag diag;
  diag.measured = spectral_norm(averaged);

  Matrix normalized_moment(k, k);
  const double inv_heads = 1.0 / static_cast<double>(sampled_heads.size());
  for (const Vector& w : sampled_heads) {
    const double n2 = dot(w, w);
    if (n2 <= 0.0)
      throw DegenerateHeadError("prior_weight_diagnostics: zero-norm head");
    rank_one_update(normalized_moment, inv_heads / n2, w, w);
  }
  const double mu_hat_sq = min_singular_value(normalized_moment);
  const double sigma_min = min_singular_value(tmatmul(b_star, b_t));
  diag.predicted = 1.0 - alpha * sigma_min * sigma_min * mu_hat_sq;
  return diag;
}

}  // namespace fedsim

#include "fedsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fedsim/errors.hpp"
#include "fedsim/parallel.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

namespace {

constexpr double kDivergenceGuard = 1e12;

double delta_norm_of(const Matrix& b, double alpha) {
  Matrix delta = gram(b);
  for (std::size_t i = 0; i < delta.rows() * delta.cols(); ++i)
    delta.data()[i] = -alpha * delta.data()[i];
  for (std::size_t i = 0; i < delta.rows(); ++i) delta(i, i) += 1.0;
  return spectral_norm(delta);
}

/// || B_{*,perp}^T B ||_2 = || (I - B_* B_*^T) B ||_2 for orthonormal B_*.
double perp_norm_of(const Matrix& b, const Matrix& b_star) {
  const Matrix m = sub(b, matmul(b_star, tmatmul(b_star, b)));
  return spectral_norm(m);
}

bool state_ok(const ModelState& s) {
  return all_finite(s.b) && all_finite(s.w) && max_abs(s.b) <= kDivergenceGuard &&
         max_abs(s.w) <= kDivergenceGuard;
}

Vector mean_head_of(const GroundTruth& gt, const std::vector<std::size_t>& clients) {
  Vector mean(gt.k());
  for (std::size_t i : clients) add_scaled(mean, 1.0, gt.heads[i]);
  return scale(mean, 1.0 / static_cast<double>(clients.size()));
}

}  // namespace

void SimConfig::validate() const {
  if (k < 1 || k >= d) throw DimensionError("SimConfig: need 1 <= k < d");
  if (num_clients < 1) throw DimensionError("SimConfig: need M >= 1");
  if (clients_per_round < 1 || clients_per_round > num_clients)
    throw InvalidSampleSizeError("SimConfig: need 1 <= m <= M");
  if (tau < 1) throw DimensionError("SimConfig: need tau >= 1");
  if (alpha <= 0.0) throw DimensionError("SimConfig: need alpha > 0");
  if (regime.kind == RegimeKind::finite_sample && regime.batch_size < 1)
    throw DimensionError("SimConfig: finite-sample regime needs batch_size >= 1");
  if (noise_sigma < 0.0) throw DimensionError("SimConfig: need noise_sigma >= 0");
}

ModelState local_step_population(const ModelState& state, const Vector& target,
                                 double alpha) {
  if (target.dim() != state.b.rows())
    throw DimensionError("local_step_population: target dimension mismatch");
  const Vector residual = sub(matvec(state.b, state.w), target);
  ModelState next;
  next.b = state.b;
  rank_one_update(next.b, -alpha, residual, state.w);
  next.w = state.w;
  add_scaled(next.w, -alpha, tmatvec(state.b, residual));
  return next;
}

ModelState local_step_finite(const ModelState& state, const Batch& batch,
                             double alpha) {
  if (batch.x.cols() != state.b.rows())
    throw DimensionError("local_step_finite: batch dimension mismatch");
  const std::size_t b = batch.x.rows();
  // residual_j = <x_j, Bw> - y_j
  Vector residual = matvec(batch.x, matvec(state.b, state.w));
  add_scaled(residual, -1.0, batch.y);
  const Vector xr = scale(tmatvec(batch.x, residual), 1.0 / static_cast<double>(b));
  ModelState next;
  next.b = state.b;
  rank_one_update(next.b, -alpha, xr, state.w);
  next.w = state.w;
  add_scaled(next.w, -alpha, tmatvec(state.b, xr));
  return next;
}

LocalTrajectory run_local(const ModelState& start, const GroundTruth& gt,
                          std::size_t client, std::size_t tau, std::size_t round_t,
                          const SimConfig& config) {
  LocalTrajectory traj;
  traj.client = client;
  traj.states.reserve(tau + 1);
  traj.states.push_back(start);
  const Vector target = gt.regressor(client);
  for (std::size_t s = 0; s < tau; ++s) {
    if (config.regime.kind == RegimeKind::population) {
      traj.states.push_back(local_step_population(traj.states.back(), target,
                                                  config.alpha));
    } else {
      const std::uint64_t key =
          rng::make_key(config.seed, rng::Tag::batch, round_t, client, s);
      const Batch batch = sample_batch(gt, client, config.regime.batch_size, key);
      traj.states.push_back(local_step_finite(traj.states.back(), batch,
                                              config.alpha));
    }
  }
  return traj;
}

std::vector<std::size_t> sample_clients(std::size_t num_clients, std::size_t m,
                                        std::size_t round_t, std::uint64_t seed) {
  if (m < 1 || m > num_clients)
    throw InvalidSampleSizeError("sample_clients: need 1 <= m <= M, got m=" +
                                 std::to_string(m));
  std::vector<std::size_t> idx(num_clients);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng::Stream stream(rng::make_key(seed, rng::Tag::clients, round_t));
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t swap_at =
        j + static_cast<std::size_t>(stream.next_below(num_clients - j));
    std::swap(idx[j], idx[swap_at]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

RoundOutcome global_round(const ModelState& state, const GroundTruth& gt,
                          std::size_t round_t, const SimConfig& config,
                          MonitorContext* ctx) {
  MonitorContext local_ctx;
  if (ctx == nullptr) {
    if (config.monitor_level != MonitorLevel::none) {
      const double dist = principal_angle_distance(state.b, gt.b_star);
      local_ctx.e0 = 1.0 - dist * dist;
      local_ctx.prev_perp = perp_norm_of(state.b, gt.b_star);
      local_ctx.prev_dist = dist;
      local_ctx.stats = diversity_stats(gt.heads);
    }
    ctx = &local_ctx;
  }

  const std::vector<std::size_t> clients =
      sample_clients(config.num_clients, config.clients_per_round, round_t,
                     config.seed);

  std::vector<LocalTrajectory> trajectories(clients.size());
  parallel_for(clients.size(), [&](std::size_t slot) {
    trajectories[slot] =
        run_local(state, gt, clients[slot], config.tau, round_t, config);
  });

  // Equal-weight average in fixed slot order.
  const double inv_m = 1.0 / static_cast<double>(clients.size());
  ModelState next;
  next.b = Matrix(state.b.rows(), state.b.cols());
  next.w = Vector(state.w.dim());
  for (const LocalTrajectory& traj : trajectories) {
    add_scaled(next.b, inv_m, traj.states.back().b);
    add_scaled(next.w, inv_m, traj.states.back().w);
  }

  RoundOutcome out;
  out.metrics.t = round_t + 1;
  out.metrics.e0 = ctx->e0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.metrics.prior_weight_measured = nan;
  out.metrics.prior_weight_predicted = nan;

  if (config.monitor_level != MonitorLevel::none && state_ok(next)) {
    const double dist = principal_angle_distance(next.b, gt.b_star);
    out.metrics.dist = dist;
    out.metrics.delta_norm = delta_norm_of(next.b, config.alpha);
    out.metrics.w_norm = norm(next.w);
    out.metrics.grad_norm_global = global_grad_norm(next, gt);
    out.metrics.perp_norm = perp_norm_of(next.b, gt.b_star);
    out.metrics.perp_norm_prev = ctx->prev_perp;

    // A1 compares w_{t+1} against the mean head of the clients sampled for
    // round t+1, mirroring the ladder's per-round pairing of state and set.
    const std::vector<std::size_t> next_clients =
        sample_clients(config.num_clients, config.clients_per_round, round_t + 1,
                       config.seed);
    const Vector mean_head = mean_head_of(gt, next_clients);
    Vector a1_ref = tmatvec(next.b, matvec(gt.b_star, mean_head));
    Matrix delta = gram(next.b);
    for (std::size_t i = 0; i < delta.rows() * delta.cols(); ++i)
      delta.data()[i] = -config.alpha * delta.data()[i];
    for (std::size_t i = 0; i < delta.rows(); ++i) delta(i, i) += 1.0;
    Vector a1_pred = add(a1_ref, matvec(delta, a1_ref));
    Vector a1_res = next.w;
    add_scaled(a1_res, -config.alpha, a1_pred);
    out.metrics.a1_residual = norm(a1_res);

    const HypothesisBounds bounds =
        hypothesis_bounds(ctx->stats, config, ctx->e0);
    out.metrics.flags.applicable = bounds.applicable;
    out.metrics.flags.a1 = out.metrics.a1_residual <= bounds.a1_global;
    out.metrics.flags.a2 = out.metrics.w_norm <= bounds.a2_global;
    out.metrics.flags.a3 = out.metrics.delta_norm <= bounds.a3_global;
    out.metrics.flags.a4 =
        out.metrics.perp_norm <= (1.0 - bounds.rate) * ctx->prev_perp;
    out.metrics.flags.a5 =
        dist <= std::pow(1.0 - bounds.rate,
                         static_cast<double>(out.metrics.t) - 1.0);

    if (config.monitor_level == MonitorLevel::full) {
      const LocalHypothesisReport local = check_local_hypotheses(
          trajectories, gt, ctx->prev_dist, ctx->e0, ctx->stats, config);
      out.metrics.flags.a1_loc = local.a1;
      out.metrics.flags.a2_loc = local.a2;
      out.metrics.flags.a3_loc = local.a3;
      out.metrics.flags.a4_loc = local.a4;
      out.metrics.a1_loc_worst = local.a1_worst;
      out.metrics.a2_loc_worst = local.a2_worst;
      out.metrics.a3_loc_worst = local.a3_worst;
      out.metrics.a4_loc_worst = local.a4_worst_ratio;

      if (config.regime.kind == RegimeKind::population) {
        std::vector<Vector> sampled_heads;
        sampled_heads.reserve(clients.size());
        for (std::size_t i : clients) sampled_heads.push_back(gt.heads[i]);
        bool heads_ok = true;
        for (const Vector& w : sampled_heads)
          if (dot(w, w) <= 0.0) heads_ok = false;
        if (heads_ok) {
          const PriorWeightDiag diag = prior_weight_diagnostics(
              trajectories, state.b, gt.b_star, config.alpha, sampled_heads);
          out.metrics.prior_weight_measured = diag.measured;
          out.metrics.prior_weight_predicted = diag.predicted;
        }
      }
    }

    ctx->prev_perp = out.metrics.perp_norm;
    ctx->prev_dist = dist;
  }

  out.state = std::move(next);
  return out;
}

TrainResult run_training(const SimConfig& config, const GroundTruth& gt,
                         const ModelState& init) {
  config.validate();

  TrainResult result;
  result.dist0 = principal_angle_distance(init.b, gt.b_star);
  result.e0 = 1.0 - result.dist0 * result.dist0;

  MonitorContext ctx;
  ctx.e0 = result.e0;
  ctx.prev_dist = result.dist0;
  ctx.stats = diversity_stats(gt.heads);
  if (config.monitor_level != MonitorLevel::none)
    ctx.prev_perp = [&] {
      const Matrix m = sub(init.b, matmul(gt.b_star, tmatmul(gt.b_star, init.b)));
      return spectral_norm(m);
    }();

  ModelState state = init;
  result.metrics.reserve(config.monitor_level == MonitorLevel::none ? 0
                                                                    : config.rounds);
  for (std::size_t t = 0; t < config.rounds; ++t) {
    RoundOutcome outcome = global_round(state, gt, t, config, &ctx);
    state = std::move(outcome.state);
    if (!state_ok(state)) {
      result.diverged = true;
      result.rounds_completed = t;
      result.state = std::move(state);
      return result;
    }
    if (config.monitor_level != MonitorLevel::none)
      result.metrics.push_back(outcome.metrics);
    result.rounds_completed = t + 1;
  }
  result.state = std::move(state);
  return result;
}

TrainResult run_training(const SimConfig& config) {
  config.validate();
  const GroundTruth gt = gen_ground_truth(config.d, config.k, config.num_clients,
                                          config.noise_sigma, config.seed);
  const ModelState init =
      gen_init(gt, config.alpha, config.delta0_target, config.seed);
  return run_training(config, gt, init);
}

FineTuneTrace finetune(const ModelState& pretrained, const GroundTruth& gt,
                       const Vector& new_head, const FineTuneParams& params) {
  if (params.tau_prime < 1) throw DimensionError("finetune: need tau_prime >= 1");
  if (params.batch_size < 1) throw DimensionError("finetune: need batch_size >= 1");
  if (new_head.dim() != gt.k()) throw DimensionError("finetune: head dimension mismatch");

  const Vector target = matvec(gt.b_star, new_head);

  // One batch, reused for every step (full-batch adaptation).
  rng::Stream stream(rng::make_key(params.seed, rng::Tag::finetune_batch));
  Batch batch;
  batch.x = rng::gaussian_matrix(stream, params.batch_size, gt.d());
  batch.y = matvec(batch.x, target);
  if (params.noise_sigma > 0.0) {
    for (std::size_t j = 0; j < params.batch_size; ++j)
      batch.y[j] += params.noise_sigma * stream.next_gaussian();
  }

  FineTuneTrace trace;
  trace.product_error_sq.reserve(params.tau_prime + 1);
  ModelState state = pretrained;
  auto record = [&] {
    const Vector err = sub(matvec(state.b, state.w), target);
    trace.product_error_sq.push_back(dot(err, err));
  };
  record();
  for (std::size_t s = 0; s < params.tau_prime; ++s) {
    state = local_step_finite(state, batch, params.alpha_ft);
    record();
  }
  return trace;
}

}  // namespace fedsim

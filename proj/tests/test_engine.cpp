#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "fedsim/engine.hpp"
#include "fedsim/lowerbound.hpp"
#include "fedsim/rng.hpp"
#include "oracles.hpp"

using namespace fedsim;

namespace {

SimConfig small_population_config(std::uint64_t seed) {
  SimConfig config;
  config.d = 20;
  config.k = 3;
  config.num_clients = 8;
  config.clients_per_round = 8;
  config.tau = 2;
  config.alpha = 0.1;
  config.rounds = 10;
  config.seed = seed;
  return config;
}

double max_entry_diff(const ModelState& a, const ModelState& b) {
  double m = max_abs(sub(a.b, b.b));
  return std::max(m, max_abs(sub(a.w, b.w)));
}

}  // namespace

TEST_CASE("population step fixes exact solutions and handles w = 0") {
  const GroundTruth gt = gen_ground_truth(12, 3, 4, 0.0, 1);
  const Vector target = gt.regressor(0);

  // State already producing the target: B = B_*, w = w_{*,0}.
  ModelState exact{gt.b_star, gt.heads[0]};
  const ModelState stepped = local_step_population(exact, target, 0.3);
  CHECK(max_entry_diff(exact, stepped) == 0.0);

  // w = 0: B untouched, w gains alpha B^T target.
  rng::Stream s(rng::derive_key({5}));
  ModelState zero_head{rng::gaussian_matrix(s, 12, 3), Vector(3)};
  const ModelState next = local_step_population(zero_head, target, 0.3);
  CHECK(max_abs(sub(next.b, zero_head.b)) == 0.0);
  const Vector expected = scale(tmatvec(zero_head.b, target), 0.3);
  CHECK(norm(sub(next.w, expected)) < 1e-15);
}

TEST_CASE("population step gradients match finite differences") {
  const GroundTruth gt = gen_ground_truth(3, 2, 2, 0.0, 2);
  const Vector target = gt.regressor(1);
  rng::Stream s(rng::derive_key({6}));
  const ModelState state{rng::gaussian_matrix(s, 3, 2), rng::gaussian_vector(s, 2)};

  const double alpha = 0.05;
  const ModelState next = local_step_population(state, target, alpha);
  const auto fd = oracle::finite_diff(
      [&target](const Matrix& b, const Vector& w) {
        const Vector e = sub(matvec(b, w), target);
        return 0.5 * dot(e, e);
      },
      state.b, state.w);

  const Matrix grad_b = scale(sub(state.b, next.b), 1.0 / alpha);
  const Vector grad_w = scale(sub(state.w, next.w), 1.0 / alpha);
  CHECK(max_abs(sub(grad_b, fd.d_b)) < 1e-6);
  CHECK(max_abs(sub(grad_w, fd.d_w)) < 1e-6);
}

TEST_CASE("finite-sample step is exact on noiseless consistent states") {
  const GroundTruth gt = gen_ground_truth(10, 2, 3, 0.0, 3);
  const Batch batch = sample_batch(gt, 1, 25, rng::derive_key({7}));
  ModelState exact{gt.b_star, gt.heads[1]};
  const ModelState next = local_step_finite(exact, batch, 0.2);
  CHECK(max_entry_diff(exact, next) < 1e-14);
}

TEST_CASE("finite-sample step gradients match finite differences") {
  const GroundTruth gt = gen_ground_truth(4, 2, 2, 0.1, 4);
  const Batch batch = sample_batch(gt, 0, 6, rng::derive_key({8}));
  rng::Stream s(rng::derive_key({9}));
  const ModelState state{rng::gaussian_matrix(s, 4, 2), rng::gaussian_vector(s, 2)};

  const double alpha = 0.05;
  const ModelState next = local_step_finite(state, batch, alpha);
  const auto fd = oracle::finite_diff(
      [&batch](const Matrix& b, const Vector& w) {
        const Vector pred = matvec(batch.x, matvec(b, w));
        const Vector e = sub(pred, batch.y);
        return dot(e, e) / (2.0 * static_cast<double>(batch.x.rows()));
      },
      state.b, state.w);

  const Matrix grad_b = scale(sub(state.b, next.b), 1.0 / alpha);
  const Vector grad_w = scale(sub(state.w, next.w), 1.0 / alpha);
  CHECK(max_abs(sub(grad_b, fd.d_b)) < 1e-6);
  CHECK(max_abs(sub(grad_w, fd.d_w)) < 1e-6);
}

TEST_CASE("finite-sample step approaches the population step as b grows") {
  const GroundTruth gt = gen_ground_truth(10, 3, 4, 0.0, 5);
  rng::Stream s(rng::derive_key({10}));
  const ModelState state{rng::gaussian_matrix(s, 10, 3), rng::gaussian_vector(s, 3)};
  const ModelState population = local_step_population(state, gt.regressor(2), 0.1);

  std::vector<std::size_t> batch_sizes = {100, 1000, 10000, 100000};
  std::vector<double> diffs;
  for (std::size_t b : batch_sizes) {
    // Average over a few batches to tame Monte Carlo noise in the slope.
    double mean_diff = 0.0;
    const int reps = 3;
    for (int rep = 0; rep < reps; ++rep) {
      const Batch batch = sample_batch(gt, 2, b, rng::derive_key({11, b, static_cast<std::uint64_t>(rep)}));
      const ModelState finite = local_step_finite(state, batch, 0.1);
      mean_diff += max_entry_diff(population, finite) / reps;
    }
    diffs.push_back(mean_diff);
  }
  double slope_num = 0.0, slope_den = 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < batch_sizes.size(); ++i) {
    mx += std::log(static_cast<double>(batch_sizes[i])) / batch_sizes.size();
    my += std::log(diffs[i]) / batch_sizes.size();
  }
  for (std::size_t i = 0; i < batch_sizes.size(); ++i) {
    const double dx = std::log(static_cast<double>(batch_sizes[i])) - mx;
    slope_num += dx * (std::log(diffs[i]) - my);
    slope_den += dx * dx;
  }
  const double slope = slope_num / slope_den;
  CHECK(slope > -0.6);
  CHECK(slope < -0.4);
}

TEST_CASE("run_local trajectory length and composition") {
  const GroundTruth gt = gen_ground_truth(20, 3, 8, 0.0, 6);
  SimConfig config = small_population_config(6);
  const ModelState init = gen_init(gt, config.alpha, std::nullopt, 6);

  config.tau = 1;
  CHECK(run_local(init, gt, 0, config.tau, 0, config).states.size() == 2);

  config.tau = 2;
  const LocalTrajectory traj = run_local(init, gt, 3, config.tau, 0, config);
  CHECK(traj.states.size() == 3);
  CHECK(traj.client == 3);
  const ModelState manual = local_step_population(
      local_step_population(init, gt.regressor(3), config.alpha),
      gt.regressor(3), config.alpha);
  CHECK(max_entry_diff(traj.states[2], manual) == 0.0);
}

TEST_CASE("local heads stay bounded at theorem-scale step size") {
  const GroundTruth gt = gen_ground_truth(20, 3, 8, 0.0, 7);
  const DiversityStats stats = diversity_stats(gt.heads);
  SimConfig config = small_population_config(7);
  config.tau = 5;
  config.alpha = (1.0 - 0.5) /
                 (config.monitor_constants.c3 * std::sqrt(5.0) * stats.l_max *
                  stats.kappa_max * stats.kappa_max);
  const ModelState init = gen_init(gt, config.alpha, 0.5, 7);

  const double bound = 2.0 * std::sqrt(config.alpha) * stats.l_max;
  for (std::size_t i = 0; i < gt.num_clients(); ++i) {
    const LocalTrajectory traj = run_local(init, gt, i, config.tau, 0, config);
    for (std::size_t s = 1; s < traj.states.size(); ++s)
      CHECK(norm(traj.states[s].w) <= bound);
  }
}

TEST_CASE("sample_clients basic contracts") {
  const std::vector<std::size_t> all = sample_clients(6, 6, 0, 99);
  CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});

  const std::vector<std::size_t> one = sample_clients(6, 1, 3, 99);
  CHECK(one.size() == 1);
  CHECK(one[0] < 6);

  CHECK_THROWS_AS(sample_clients(4, 5, 0, 99), InvalidSampleSizeError);
  CHECK(sample_clients(6, 3, 5, 99) == sample_clients(6, 3, 5, 99));
}

TEST_CASE("sample_clients is uniform across rounds") {
  const std::size_t num_clients = 10, m = 3, rounds = 100000;
  std::vector<std::size_t> counts(num_clients, 0);
  for (std::size_t t = 0; t < rounds; ++t)
    for (std::size_t i : sample_clients(num_clients, m, t, 1234)) ++counts[i];
  for (std::size_t i = 0; i < num_clients; ++i) {
    const double rate = static_cast<double>(counts[i]) / rounds;
    CHECK(std::abs(rate - 0.3) < 0.01);
  }
}

TEST_CASE("identical heads collapse averaging to a single client") {
  GroundTruth gt = gen_ground_truth(15, 2, 5, 0.0, 8);
  for (std::size_t i = 1; i < 5; ++i) gt.heads[i] = gt.heads[0];
  SimConfig config = small_population_config(8);
  config.d = 15;
  config.k = 2;
  config.num_clients = 5;
  config.clients_per_round = 5;
  config.tau = 3;
  const ModelState init = gen_init(gt, config.alpha, std::nullopt, 8);

  const RoundOutcome outcome = global_round(init, gt, 0, config);
  const LocalTrajectory solo = run_local(init, gt, 0, config.tau, 0, config);
  CHECK(max_entry_diff(outcome.state, solo.states.back()) < 1e-15);
}

TEST_CASE("two-client average is the elementwise mean of one-step updates") {
  const GroundTruth gt = gen_ground_truth(10, 2, 2, 0.0, 9);
  SimConfig config;
  config.d = 10;
  config.k = 2;
  config.num_clients = 2;
  config.clients_per_round = 2;
  config.tau = 1;
  config.alpha = 0.2;
  config.rounds = 1;
  config.seed = 9;
  const ModelState init = gen_init(gt, config.alpha, std::nullopt, 9);

  const RoundOutcome outcome = global_round(init, gt, 0, config);
  const ModelState u0 = local_step_population(init, gt.regressor(0), 0.2);
  const ModelState u1 = local_step_population(init, gt.regressor(1), 0.2);
  ModelState mean{scale(add(u0.b, u1.b), 0.5), scale(add(u0.w, u1.w), 0.5)};
  CHECK(max_entry_diff(outcome.state, mean) < 1e-15);
}

TEST_CASE("full-participation one-step round equals the closed-form D-GD update") {
  const GroundTruth gt = gen_ground_truth(30, 4, 10, 0.0, 10);
  SimConfig config;
  config.d = 30;
  config.k = 4;
  config.num_clients = 10;
  config.clients_per_round = 10;
  config.tau = 1;
  config.alpha = 0.4;
  config.rounds = 1;
  config.seed = 10;
  ModelState init = gen_init(gt, config.alpha, std::nullopt, 10);
  init.w = Vector(4);
  init.w[0] = 0.3;
  init.w[2] = -0.1;

  const RoundOutcome outcome = global_round(init, gt, 0, config);
  const Vector mean_regressor = gt.mean_regressor();
  const Vector residual = sub(matvec(init.b, init.w), mean_regressor);
  ModelState expected = init;
  rank_one_update(expected.b, -config.alpha, residual, init.w);
  add_scaled(expected.w, -config.alpha, tmatvec(init.b, residual));
  CHECK(max_entry_diff(outcome.state, expected) < 1e-12);
}

TEST_CASE("engine D-GD matches the closed-form recursion for 50 rounds") {
  const GroundTruth gt = gen_ground_truth(25, 3, 6, 0.0, 11);
  SimConfig config;
  config.d = 25;
  config.k = 3;
  config.num_clients = 6;
  config.clients_per_round = 6;
  config.tau = 1;
  config.alpha = 0.4;
  config.rounds = 50;
  config.seed = 11;
  config.monitor_level = MonitorLevel::none;
  const ModelState init = gen_init(gt, config.alpha, std::nullopt, 11);

  const TrainResult engine = run_training(config, gt, init);
  const ModelState closed =
      dgd_population_recursion(init, gt.mean_regressor(), config.alpha, 50);
  const double scale_b = std::max(1.0, max_abs(closed.b));
  CHECK(max_abs(sub(engine.state.b, closed.b)) / scale_b < 1e-12);
  CHECK(max_abs(sub(engine.state.w, closed.w)) < 1e-12);
}

TEST_CASE("config validation rejects inconsistent setups") {
  SimConfig config;
  config.d = 10;
  config.k = 2;
  config.num_clients = 4;
  config.clients_per_round = 4;

  SimConfig bad = config;
  bad.k = 10;
  CHECK_THROWS_AS(bad.validate(), DimensionError);
  bad = config;
  bad.clients_per_round = 5;
  CHECK_THROWS_AS(bad.validate(), InvalidSampleSizeError);
  bad = config;
  bad.tau = 0;
  CHECK_THROWS_AS(bad.validate(), DimensionError);
  bad = config;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), DimensionError);
  bad = config;
  bad.regime = Regime::finite_sample(0);
  CHECK_THROWS_AS(bad.validate(), DimensionError);
}

TEST_CASE("run_training handles T = 0 and divergence") {
  const GroundTruth gt = gen_ground_truth(10, 2, 4, 0.0, 12);
  SimConfig config;
  config.d = 10;
  config.k = 2;
  config.num_clients = 4;
  config.clients_per_round = 4;
  config.tau = 2;
  config.alpha = 0.3;
  config.rounds = 0;
  config.seed = 12;
  const ModelState init = gen_init(gt, config.alpha, std::nullopt, 12);

  const TrainResult unchanged = run_training(config, gt, init);
  CHECK(unchanged.rounds_completed == 0);
  CHECK(max_entry_diff(unchanged.state, init) == 0.0);

  config.alpha = 50.0;  // far beyond any stable step size
  config.rounds = 200;
  const TrainResult blown = run_training(config, gt, init);
  CHECK(blown.diverged);
  CHECK(blown.rounds_completed < 200);
}

TEST_CASE("round output is bit-identical across thread counts") {
  const GroundTruth gt = gen_ground_truth(20, 3, 8, 0.0, 13);
  SimConfig config = small_population_config(13);
  config.rounds = 5;
  const ModelState init = gen_init(gt, config.alpha, std::nullopt, 13);

  setenv("SIM_THREADS", "1", 1);
  const TrainResult serial = run_training(config, gt, init);
  setenv("SIM_THREADS", "4", 1);
  const TrainResult threaded = run_training(config, gt, init);
  unsetenv("SIM_THREADS");

  CHECK(serial.state.b == threaded.state.b);
  CHECK(serial.state.w == threaded.state.w);
  REQUIRE(serial.metrics.size() == threaded.metrics.size());
  for (std::size_t i = 0; i < serial.metrics.size(); ++i) {
    CHECK(serial.metrics[i].dist == threaded.metrics[i].dist);
    CHECK(serial.metrics[i].grad_norm_global == threaded.metrics[i].grad_norm_global);
  }
}

TEST_CASE("finite-sample training is thread-deterministic and learns") {
  SimConfig config;
  config.d = 30;
  config.k = 3;
  config.num_clients = 12;
  config.clients_per_round = 6;
  config.tau = 2;
  config.alpha = 0.2;
  config.rounds = 150;
  config.seed = 17;
  config.regime = Regime::finite_sample(64);
  config.noise_sigma = 0.05;
  config.delta0_target = 0.5;
  config.monitor_level = MonitorLevel::global;

  setenv("SIM_THREADS", "1", 1);
  const TrainResult serial = run_training(config);
  setenv("SIM_THREADS", "3", 1);
  const TrainResult threaded = run_training(config);
  unsetenv("SIM_THREADS");

  CHECK(serial.state.b == threaded.state.b);
  CHECK(serial.state.w == threaded.state.w);
  CHECK(serial.metrics.back().dist == threaded.metrics.back().dist);

  // Mini-batch noise still leaves clear subspace progress.
  CHECK(serial.metrics.back().dist < 0.5 * serial.dist0);
}

TEST_CASE("perpendicular energy never grows under theorem-scale steps") {
  const GroundTruth gt = gen_ground_truth(20, 3, 8, 0.0, 14);
  const DiversityStats stats = diversity_stats(gt.heads);
  SimConfig config = small_population_config(14);
  config.tau = 4;
  config.alpha = (1.0 - 0.5) /
                 (config.monitor_constants.c3 * std::sqrt(4.0) * stats.l_max *
                  stats.kappa_max * stats.kappa_max);
  config.rounds = 30;
  const ModelState init = gen_init(gt, config.alpha, 0.5, 14);

  const TrainResult result = run_training(config, gt, init);
  REQUIRE(!result.metrics.empty());
  for (const RoundMetrics& m : result.metrics)
    CHECK(m.perp_norm <= m.perp_norm_prev * (1.0 + 1e-12));
}

TEST_CASE("high-rate recipe converges monotonically below 1e-6") {
  SimConfig config;
  config.d = 100;
  config.k = 5;
  config.num_clients = 40;
  config.clients_per_round = 40;
  config.tau = 2;
  config.alpha = 0.4;
  config.rounds = 400;
  config.seed = 1;
  config.monitor_level = MonitorLevel::global;

  const TrainResult result = run_training(config);
  REQUIRE(result.metrics.size() == 400);
  CHECK(result.metrics.back().dist < 1e-6);
  for (std::size_t i = 5; i < result.metrics.size(); ++i) {
    if (result.metrics[i].dist > 1e-12)
      CHECK(result.metrics[i].dist <=
            result.metrics[i - 1].dist * (1.0 + 1e-9));
  }
}

TEST_CASE("finetune reaches zero error from an already-optimal model") {
  GroundTruth gt = gen_ground_truth(15, 3, 4, 0.0, 15);
  rng::Stream s(rng::make_key(15, rng::Tag::finetune_head));
  const Vector new_head = rng::gaussian_vector(s, 3);

  FineTuneParams params;
  params.tau_prime = 10;
  params.alpha_ft = 0.01;
  params.batch_size = 8;
  params.noise_sigma = 0.0;
  params.seed = 15;

  const ModelState optimal{gt.b_star, new_head};
  const FineTuneTrace trace = finetune(optimal, gt, new_head, params);
  for (double err : trace.product_error_sq) CHECK(err < 1e-24);
}

TEST_CASE("finetune solves exactly inside a recovered subspace") {
  // Pretrained B spans col(B_*) (dist = 0) but with a wrong head; with
  // noiseless data and n >= k the head is exactly identifiable by least
  // squares. A well-scaled representation keeps its own drift negligible,
  // so adaptation drives the product error to numerical zero.
  const GroundTruth gt = gen_ground_truth(15, 3, 4, 0.0, 16);
  rng::Stream s(rng::make_key(16, rng::Tag::finetune_head));
  const Vector new_head = rng::gaussian_vector(s, 3);

  ModelState pretrained{scale(gt.b_star, 100.0), Vector(3)};
  FineTuneParams params;
  params.tau_prime = 3000;
  params.alpha_ft = 2e-5;
  params.batch_size = 6;
  params.noise_sigma = 0.0;
  params.seed = 16;

  const FineTuneTrace trace = finetune(pretrained, gt, new_head, params);
  CHECK(trace.final_error_sq() < 1e-8);
}

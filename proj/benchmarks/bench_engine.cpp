#include <benchmark/benchmark.h>

#include "fedsim/engine.hpp"

namespace {

fedsim::SimConfig figure_shape_config(fedsim::MonitorLevel level) {
  fedsim::SimConfig config;
  config.d = 100;
  config.k = 5;
  config.num_clients = 40;
  config.clients_per_round = 40;
  config.tau = 2;
  config.alpha = 0.4;
  config.rounds = 1;
  config.seed = 9;
  config.monitor_level = level;
  return config;
}

void BM_PopulationRound(benchmark::State& state) {
  const auto config = figure_shape_config(
      static_cast<fedsim::MonitorLevel>(state.range(0)));
  const auto gt = fedsim::gen_ground_truth(config.d, config.k, config.num_clients,
                                           0.0, config.seed);
  const auto init = fedsim::gen_init(gt, config.alpha, std::nullopt, config.seed);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fedsim::global_round(init, gt, 0, config));
  }
}
BENCHMARK(BM_PopulationRound)
    ->Arg(static_cast<int>(fedsim::MonitorLevel::none))
    ->Arg(static_cast<int>(fedsim::MonitorLevel::global))
    ->Arg(static_cast<int>(fedsim::MonitorLevel::full));

void BM_FiniteSampleRound(benchmark::State& state) {
  auto config = figure_shape_config(fedsim::MonitorLevel::none);
  config.regime = fedsim::Regime::finite_sample(
      static_cast<std::size_t>(state.range(0)));
  config.noise_sigma = 0.1;
  const auto gt = fedsim::gen_ground_truth(config.d, config.k, config.num_clients,
                                           config.noise_sigma, config.seed);
  const auto init = fedsim::gen_init(gt, config.alpha, std::nullopt, config.seed);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fedsim::global_round(init, gt, 0, config));
  }
}
BENCHMARK(BM_FiniteSampleRound)->Arg(16)->Arg(128);

}  // namespace

#include <benchmark/benchmark.h>

#include "fedsim/linalg.hpp"
#include "fedsim/rng.hpp"

namespace {

fedsim::Matrix random_matrix(std::size_t rows, std::size_t cols,
                             std::uint64_t seed = 0) {
  fedsim::rng::Stream stream(fedsim::rng::derive_key({seed, rows, cols}));
  return fedsim::rng::gaussian_matrix(stream, rows, cols);
}

void BM_Orthonormalize(benchmark::State& state) {
  const auto a = random_matrix(static_cast<std::size_t>(state.range(0)),
                               static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fedsim::orthonormalize(a));
  }
}
BENCHMARK(BM_Orthonormalize)->Args({100, 5})->Args({1000, 50});

void BM_SpectralNorm(benchmark::State& state) {
  const auto a = random_matrix(static_cast<std::size_t>(state.range(0)),
                               static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fedsim::spectral_norm(a));
  }
}
BENCHMARK(BM_SpectralNorm)->Args({100, 5})->Args({1000, 50});

void BM_PrincipalAngleDistance(benchmark::State& state) {
  const auto b1 = random_matrix(static_cast<std::size_t>(state.range(0)),
                                static_cast<std::size_t>(state.range(1)), 1);
  const auto b2 = random_matrix(static_cast<std::size_t>(state.range(0)),
                                static_cast<std::size_t>(state.range(1)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fedsim::principal_angle_distance(b1, b2));
  }
}
BENCHMARK(BM_PrincipalAngleDistance)->Args({100, 5})->Args({1000, 20});

}  // namespace

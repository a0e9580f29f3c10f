#include <doctest.h>

#include <cmath>
#include <vector>

#include "fedsim/concentration.hpp"
#include "fedsim/problem.hpp"
#include "fedsim/rng.hpp"

using namespace fedsim;

TEST_CASE("scalar gram deviation matches the chi-squared scale") {
  // d = d1 = d2 = 1 with unit projections: the deviation is
  // |(1/b) chi^2_b - 1|, whose mean is sqrt(2/b) * sqrt(2/pi) by the CLT.
  Matrix u(1, 1);
  u(0, 0) = 1.0;
  const std::size_t b = 512;
  const std::size_t trials = 2000;
  double mean = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial)
    mean += projected_gram_deviation(u, u, b, rng::derive_key({21, trial})) /
            static_cast<double>(trials);
  const double clt_scale = std::sqrt(2.0 / static_cast<double>(b));
  CHECK(std::abs(mean - clt_scale * std::sqrt(2.0 / M_PI)) < 0.2 * clt_scale);

  // Singleton curve: slope is undefined and flagged as NaN.
  const std::vector<std::size_t> bs = {256};
  const DeviationCurve curve = gram_deviation_experiment(1, 1, 1, bs, 400, 21);
  CHECK(curve.mean_deviation[0] > 0.0);
  CHECK(std::isnan(curve.fitted_slope));
}

TEST_CASE("zero projections give identically zero deviation") {
  const Matrix u(6, 2);  // all zeros
  Matrix v(6, 3);
  v(0, 0) = 1.0;
  v(3, 2) = -2.0;
  CHECK(projected_gram_deviation(u, v, 50, rng::derive_key({30})) == 0.0);
  CHECK(projected_gram_deviation(v, u, 50, rng::derive_key({31})) == 0.0);
}

TEST_CASE("gram deviation mean decays like b^{-1/2}") {
  const std::vector<std::size_t> bs = {100, 1000, 10000};
  const DeviationCurve curve = gram_deviation_experiment(20, 5, 5, bs, 40, 22);
  CHECK(curve.fitted_slope > -0.6);
  CHECK(curve.fitted_slope < -0.4);
  // Mean deviations decrease along the curve (one inversion allowed).
  int inversions = 0;
  for (std::size_t i = 1; i < curve.mean_deviation.size(); ++i)
    if (curve.mean_deviation[i] > curve.mean_deviation[i - 1]) ++inversions;
  CHECK(inversions <= 1);
  for (double q : curve.quantile95) CHECK(q >= 0.0);
}

TEST_CASE("averaged gram deviation decays like M^{-1/2} and nests the single case") {
  const std::vector<std::size_t> ms = {1, 10, 100};
  const DeviationCurve curve =
      averaged_gram_deviation_experiment(20, 5, 5, ms, 100, 40, 23);
  CHECK(curve.fitted_slope > -0.6);
  CHECK(curve.fitted_slope < -0.4);

  int inversions = 0;
  for (std::size_t i = 1; i < curve.mean_deviation.size(); ++i)
    if (curve.mean_deviation[i] > curve.mean_deviation[i - 1]) ++inversions;
  CHECK(inversions <= 1);

  // M = 1 with aligned streams is bit-identical to the single-Sigma curve at
  // the same batch size.
  const std::vector<std::size_t> m1 = {1};
  const std::vector<std::size_t> b1 = {100};
  const DeviationCurve avg = averaged_gram_deviation_experiment(20, 5, 5, m1, 100, 40, 23);
  const DeviationCurve single = gram_deviation_experiment(20, 5, 5, b1, 40, 23);
  CHECK(avg.mean_deviation[0] == single.mean_deviation[0]);
  CHECK(avg.quantile95[0] == single.quantile95[0]);
}

TEST_CASE("deviation statistics are deterministic given the seed") {
  const std::vector<std::size_t> bs = {100, 400};
  const DeviationCurve a = gram_deviation_experiment(10, 3, 3, bs, 32, 24);
  const DeviationCurve b = gram_deviation_experiment(10, 3, 3, bs, 32, 24);
  CHECK(a.mean_deviation == b.mean_deviation);
  CHECK(a.quantile95 == b.quantile95);
  CHECK(a.fitted_slope == b.fitted_slope);
}

TEST_CASE("head sampling event holds surely at m = M and fails for m = 1") {
  const GroundTruth gt = gen_ground_truth(10, 5, 40, 0.0, 25);

  const double rate_full =
      head_sampling_event_rate(gt.heads, 40, 0.01, 5, 200, 25);
  CHECK(rate_full == 1.0);

  // Tight alpha makes the bound 4 alpha^2 L^3 minuscule next to the actual
  // deviation of a single sampled head.
  const double rate_one = head_sampling_event_rate(gt.heads, 1, 0.01, 5, 200, 25);
  CHECK(rate_one < 1.0);
}

TEST_CASE("threshold participation keeps the event rate at one") {
  const GroundTruth gt = gen_ground_truth(10, 5, 40, 0.0, 26);
  const DiversityStats stats = diversity_stats(gt.heads);
  const std::size_t rounds = 10;

  // Choose alpha so the analytic threshold lands strictly inside (1, M).
  double alpha = 0.2;
  std::size_t threshold = head_sampling_threshold(stats, 5, 40, alpha, rounds);
  while (threshold >= 40 && alpha < 2.0) {
    alpha *= 1.1;
    threshold = head_sampling_threshold(stats, 5, 40, alpha, rounds);
  }
  REQUIRE(threshold < 40);
  REQUIRE(threshold >= 1);

  const double rate =
      head_sampling_event_rate(gt.heads, threshold, alpha, rounds, 2000, 26);
  CHECK(rate == 1.0);
}

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedsim/problem.hpp"

namespace fedsim {

/// Monte Carlo deviation statistics along a growing-sample-size axis, plus
/// the log-log slope of the mean against that axis (NaN when fewer than two
/// points are available).
struct DeviationCurve {
  std::vector<std::size_t> sample_sizes;
  std::vector<double> mean_deviation;
  std::vector<double> quantile95;
  double fitted_slope = 0.0;
};

/// || U^T Sigma V - U^T V ||_2 for one batch of b fresh N(0, I_d) samples
/// drawn from the stream key, with caller-supplied projections.
double projected_gram_deviation(const Matrix& u, const Matrix& v, std::size_t b,
                                std::uint64_t stream_key);

/// Deviation of the projected empirical gram matrix: for fixed Gaussian
/// U (d x d1) and V (d x d2), samples Sigma = (1/b) sum_j x_j x_j^T with
/// x_j ~ N(0, I_d) and records || U^T Sigma V - U^T V ||_2 per trial per b.
/// The mean deviation should decay like b^{-1/2}.
DeviationCurve gram_deviation_experiment(std::size_t d, std::size_t d1,
                                         std::size_t d2,
                                         std::span<const std::size_t> b_values,
                                         std::size_t trials, std::uint64_t seed);

/// Averaged variant: M independent (U_i, Sigma_i, V_i) triples at fixed batch
/// size b, deviation of the average of the M projected gram errors, slope fit
/// against M (expected -1/2). With M = 1 and aligned streams this reproduces
/// gram_deviation_experiment bit for bit.
DeviationCurve averaged_gram_deviation_experiment(
    std::size_t d, std::size_t d1, std::size_t d2,
    std::span<const std::size_t> m_values, std::size_t b, std::size_t trials,
    std::uint64_t seed);

/// Monte Carlo frequency, over `trials`, that the head-subsampling event
/// holds in all T rounds:
///   || mean_{I_t} w - w_bar ||          <= 4 alpha^2 L_max^3   and
///   || mean_{I_t} w w^T - mean_M w w^T ||_2 <= 4 alpha^2 L_max^4.
/// With m = M both deviations are exactly zero, so the rate is 1.
double head_sampling_event_rate(std::span<const Vector> heads, std::size_t m,
                                double alpha, std::size_t rounds,
                                std::size_t trials, std::uint64_t seed);

/// Participation threshold above which the subsampling event is guaranteed
/// with overwhelming probability:
/// min(M, 20 ((gamma/L)^2 + (H/L)^4) (alpha L)^{-4} log(k T)).
std::size_t head_sampling_threshold(const DiversityStats& stats, std::size_t k,
                                    std::size_t num_clients, double alpha,
                                    std::size_t rounds);

}  // namespace fedsim

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fedsim/problem.hpp"

namespace fedsim {

/// Two ground-truth representations that produce the same mean regressor,
/// are each at distance delta0 from B0, and are mutually far apart.
struct AdversarialPair {
  Matrix b_star;
  Matrix b_star_prime;
  Matrix b0;  // orthonormal columns
  double delta0 = 0.0;
};

/// Orthonormal B0 whose column space contains B_* w_bar (first column is the
/// normalized mean regressor) with principal_angle_distance(B0, B_*) = delta0:
/// the k-1 remaining columns are the complement of the mean-regressor
/// direction inside col(B_*), each tilted by arcsin(delta0) toward fresh
/// directions orthogonal to col(B_*).
///
/// Requires delta0 in (0, 1/2], k > 1, d >= 2k - 1 (room for the tilt), and a
/// nonzero mean head.
Matrix make_b0_containing_product(const Matrix& b_star,
                                  std::span<const Vector> heads, double delta0,
                                  std::uint64_t seed);

/// The reflection construction: decomposes B0 and B_* around the shared
/// mean-regressor direction and returns B_*' whose complement block is the
/// reflection of B_*'s through col(B0)'s complement block. The result is
/// orthonormal, keeps B_*' w_bar = B_* w_bar, stays at distance delta0 from
/// B0, and sits at distance >= 2 delta0 sqrt(1 - delta0^2) from B_*.
AdversarialPair construct_adversarial(const Matrix& b0, const Matrix& b_star,
                                      std::span<const Vector> heads);

/// Closed-form D-GD recursion on the population objective with equal weights;
/// depends on the ground truth only through the mean regressor:
///   B_{t+1} = B_t - alpha (B_t w_t - beta_bar) w_t^T
///   w_{t+1} = w_t - alpha B_t^T (B_t w_t - beta_bar)
ModelState dgd_population_recursion(const ModelState& init,
                                    const Vector& mean_regressor, double alpha,
                                    std::size_t rounds);

struct PairedDgdReport {
  double delta0 = 0.0;
  double dist_to_star = 0.0;
  double dist_to_prime = 0.0;
  double max_final_dist = 0.0;
  bool trajectories_identical = false;
  /// 1 when D-GD already fails against B_* itself, 2 when the reflected
  /// ground truth is the one that defeats it.
  int failure_case = 0;
  /// || B_* w_bar - B_*' w_bar ||, the realized product-match residual.
  double containment_residual = 0.0;
  double dist_between_truths = 0.0;
  /// dist(B_T, B_*') - (dist(B_*, B_*') - dist(B_T, B_*)); >= -1e-8 always.
  double triangle_slack = 0.0;
};

/// Runs D-GD from (B0, w0 = 0) against both ground truths of the pair. The
/// recursion consumes the ground truth only through its mean regressor, and
/// the pair's product-match invariant makes the two regressors equal, so both
/// runs execute the same floating-point recursion; the report asserts the
/// resulting trajectories are bit-identical and evaluates the final iterate
/// against both truths.
PairedDgdReport paired_dgd_experiment(const AdversarialPair& pair,
                                      std::span<const Vector> heads, double alpha,
                                      std::size_t rounds);

}  // namespace fedsim

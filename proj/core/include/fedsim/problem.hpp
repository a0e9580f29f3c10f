#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fedsim/linalg.hpp"

namespace fedsim {

/// The planted system: orthonormal representation, per-client heads, and the
/// label noise level.
struct GroundTruth {
  Matrix b_star;               // d x k, orthonormal columns
  std::vector<Vector> heads;   // M heads, each of dim k
  double noise_sigma = 0.0;

  std::size_t d() const { return b_star.rows(); }
  std::size_t k() const { return b_star.cols(); }
  std::size_t num_clients() const { return heads.size(); }

  /// B_* w_{*,i}, the client's ground-truth regressor.
  Vector regressor(std::size_t client) const;
  /// B_* w_bar, the mean regressor across clients.
  Vector mean_regressor() const;
  Vector mean_head() const;
};

/// Head-diversity statistics that gate the theory.
struct DiversityStats {
  double mu = 0.0;         // sqrt of smallest eigenvalue of centered covariance
  double l_max = 0.0;      // max head norm
  double gamma = 0.0;      // sqrt of mean squared centered norm
  double h = 0.0;          // fourth-moment spread, H^4 = mean ||ww^T - S||_2^2
  double kappa_max = 0.0;  // l_max / mu, +inf when mu == 0
  Vector w_bar;
};

/// One client mini-batch: rows of x are samples, y_j = <B_* w_{*,i}, x_j> + noise.
struct Batch {
  Matrix x;  // b x d
  Vector y;  // b
};

struct ModelState {
  Matrix b;  // d x k
  Vector w;  // k
};

/// Samples an orthonormal B_* (QR of a Gaussian matrix) and M i.i.d. standard
/// normal heads. Deterministic given the seed.
GroundTruth gen_ground_truth(std::size_t d, std::size_t k, std::size_t m_clients,
                             double noise_sigma, std::uint64_t seed);

DiversityStats diversity_stats(const std::vector<Vector>& heads);

/// Model initialization: w_0 = 0 and B_0 = (1/sqrt(alpha)) Q. Without a
/// target, Q is the orthonormalization of a Gaussian matrix. With a target
/// t in (0, 1), Q is planted so that principal_angle_distance(B_0, B_*) = t:
/// one column of B_* is rotated by arcsin(t) toward a direction orthogonal
/// to col(B_*), the remaining k-1 columns stay aligned.
ModelState gen_init(const GroundTruth& gt, double alpha,
                    std::optional<double> delta0_target, std::uint64_t seed);

/// Draws b i.i.d. N(0, I_d) rows and noisy labels for one client. The stream
/// key fully determines the batch, so batches for distinct (t, i, s) are
/// independent and order-insensitive.
Batch sample_batch(const GroundTruth& gt, std::size_t client, std::size_t b,
                   std::uint64_t stream_key);

}  // namespace fedsim

#include "fedsim/problem.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

Vector GroundTruth::regressor(std::size_t client) const {
  return matvec(b_star, heads[client]);
}

Vector GroundTruth::mean_regressor() const { return matvec(b_star, mean_head()); }

Vector GroundTruth::mean_head() const {
  Vector w_bar(k());
  for (const Vector& w : heads) add_scaled(w_bar, 1.0, w);
  return scale(w_bar, 1.0 / static_cast<double>(heads.size()));
}

GroundTruth gen_ground_truth(std::size_t d, std::size_t k, std::size_t m_clients,
                             double noise_sigma, std::uint64_t seed) {
  if (k < 1 || k >= d) {
    throw DimensionError("gen_ground_truth: need 1 <= k < d, got k=" +
                         std::to_string(k) + ", d=" + std::to_string(d));
  }
  if (m_clients < 1) throw DimensionError("gen_ground_truth: need M >= 1");
  if (noise_sigma < 0.0) throw DimensionError("gen_ground_truth: noise_sigma < 0");

  GroundTruth gt;
  gt.noise_sigma = noise_sigma;
  rng::Stream basis_stream(rng::make_key(seed, rng::Tag::ground_truth_basis));
  gt.b_star = orthonormalize(rng::gaussian_matrix(basis_stream, d, k)).q;
  rng::Stream head_stream(rng::make_key(seed, rng::Tag::heads));
  gt.heads.reserve(m_clients);
  for (std::size_t i = 0; i < m_clients; ++i)
    gt.heads.push_back(rng::gaussian_vector(head_stream, k));
  return gt;
}

DiversityStats diversity_stats(const std::vector<Vector>& heads) {
  const std::size_t m = heads.size();
  const std::size_t k = heads.front().dim();
  const double inv_m = 1.0 / static_cast<double>(m);

  DiversityStats stats;
  stats.w_bar = Vector(k);
  for (const Vector& w : heads) add_scaled(stats.w_bar, 1.0, w);
  stats.w_bar = scale(stats.w_bar, inv_m);

  Matrix centered_cov(k, k);
  Matrix second_moment(k, k);
  double gamma_sq = 0.0;
  for (const Vector& w : heads) {
    stats.l_max = std::max(stats.l_max, norm(w));
    const Vector c = sub(w, stats.w_bar);
    gamma_sq += inv_m * dot(c, c);
    rank_one_update(centered_cov, inv_m, c, c);
    rank_one_update(second_moment, inv_m, w, w);
  }
  stats.gamma = std::sqrt(gamma_sq);
  stats.mu = std::sqrt(min_singular_value(centered_cov));

  double h4 = 0.0;
  for (const Vector& w : heads) {
    Matrix dev(k, k);
    rank_one_update(dev, 1.0, w, w);
    add_scaled(dev, -1.0, second_moment);
    const double s = spectral_norm(dev);
    h4 += inv_m * s * s;
  }
  stats.h = std::pow(h4, 0.25);

  stats.kappa_max = stats.mu > 0.0 ? stats.l_max / stats.mu
                                   : std::numeric_limits<double>::infinity();
  return stats;
}

ModelState gen_init(const GroundTruth& gt, double alpha,
                    std::optional<double> delta0_target, std::uint64_t seed) {
  if (alpha <= 0.0) throw DimensionError("gen_init: alpha must be positive");
  const std::size_t d = gt.d();
  const std::size_t k = gt.k();
  const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);

  ModelState state;
  state.w = Vector(k);

  rng::Stream stream(rng::make_key(seed, rng::Tag::init));
  if (!delta0_target.has_value()) {
    state.b = scale(orthonormalize(rng::gaussian_matrix(stream, d, k)).q,
                    inv_sqrt_alpha);
    return state;
  }

  const double t = *delta0_target;
  if (!(t > 0.0 && t < 1.0)) {
    throw TargetInfeasibleError("gen_init: delta0_target must lie in (0, 1)");
  }

  // Direction orthogonal to col(B_*); re-project once for accuracy.
  Vector g;
  for (;;) {
    g = rng::gaussian_vector(stream, d);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector proj = tmatvec(gt.b_star, g);
      add_scaled(g, -1.0, matvec(gt.b_star, proj));
    }
    const double n = norm(g);
    if (n > 1e-8) {
      g = scale(g, 1.0 / n);
      break;
    }
  }

  const double theta = std::asin(t);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Matrix q(d, k);
  for (std::size_t i = 0; i < d; ++i) {
    q(i, 0) = c * gt.b_star(i, 0) + s * g[i];
    for (std::size_t j = 1; j < k; ++j) q(i, j) = gt.b_star(i, j);
  }
  state.b = scale(q, inv_sqrt_alpha);
  return state;
}

Batch sample_batch(const GroundTruth& gt, std::size_t client, std::size_t b,
                   std::uint64_t stream_key) {
  if (client >= gt.num_clients()) throw DimensionError("sample_batch: client index out of range");
  if (b < 1) throw DimensionError("sample_batch: need b >= 1");

  rng::Stream stream(stream_key);
  Batch batch;
  batch.x = rng::gaussian_matrix(stream, b, gt.d());
  const Vector beta = gt.regressor(client);
  batch.y = matvec(batch.x, beta);
  if (gt.noise_sigma > 0.0) {
    for (std::size_t j = 0; j < b; ++j)
      batch.y[j] += gt.noise_sigma * stream.next_gaussian();
  }
  return batch;
}

}  // namespace fedsim

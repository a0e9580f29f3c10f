#include "fedsim/lowerbound.hpp"

#include <cmath>
#include <string>

#include "fedsim/errors.hpp"
#include "fedsim/rng.hpp"

namespace fedsim {

namespace {

Vector mean_of(std::span<const Vector> heads) {
  Vector mean(heads.front().dim());
  for (const Vector& w : heads) add_scaled(mean, 1.0, w);
  return scale(mean, 1.0 / static_cast<double>(heads.size()));
}

/// Orthonormal basis of the hyperplane orthogonal to unit vector v in R^k,
/// via the Householder reflector that maps e_1 to v: columns 2..k of H.
Matrix orthonormal_complement_in_rk(const Vector& v) {
  const std::size_t k = v.dim();
  Vector p = v;
  p[0] -= (v[0] >= 0.0 ? -1.0 : 1.0);  // p = v - sign * e_1, sign = -sign(v0)
  const double pn2 = dot(p, p);
  Matrix h = Matrix::identity(k);
  if (pn2 > 0.0) {
    rank_one_update(h, -2.0 / pn2, p, p);
  }
  // H e_1 = +/- v; the remaining columns span v-perp either way.
  Matrix out(k, k - 1);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 1; j < k; ++j) out(i, j - 1) = h(i, j);
  return out;
}

}  // namespace

Matrix make_b0_containing_product(const Matrix& b_star,
                                  std::span<const Vector> heads, double delta0,
                                  std::uint64_t seed) {
  const std::size_t d = b_star.rows();
  const std::size_t k = b_star.cols();
  if (k <= 1) throw RankError("make_b0_containing_product: requires k > 1");
  if (!(delta0 > 0.0 && delta0 <= 0.5))
    throw TargetInfeasibleError("make_b0_containing_product: delta0 must be in (0, 1/2]");
  if (d < 2 * k - 1)
    throw DimensionError("make_b0_containing_product: need d >= 2k - 1");

  const Vector w_bar = mean_of(heads);
  const double wn = norm(w_bar);
  if (wn < 1e-12)
    throw DegenerateMeanHeadError("make_b0_containing_product: mean head is zero");

  // u = B_* w_bar / ||w_bar||; C = complement of u inside col(B_*).
  const Vector v = scale(w_bar, 1.0 / wn);
  const Vector u = matvec(b_star, v);
  const Matrix c = matmul(b_star, orthonormal_complement_in_rk(v));

  // k-1 fresh directions orthogonal to col(B_*): project a Gaussian block out
  // of col(B_*) and orthonormalize.
  rng::Stream stream(rng::make_key(seed, rng::Tag::init));
  Matrix g = rng::gaussian_matrix(stream, d, k - 1);
  for (int pass = 0; pass < 2; ++pass) {
    const Matrix proj = tmatmul(b_star, g);
    g = sub(g, matmul(b_star, proj));
  }
  const Matrix g_orth = orthonormalize(g).q;

  const double theta = std::asin(delta0);
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  Matrix b0(d, k);
  for (std::size_t i = 0; i < d; ++i) {
    b0(i, 0) = u[i];
    for (std::size_t j = 1; j < k; ++j)
      b0(i, j) = ct * c(i, j - 1) + st * g_orth(i, j - 1);
  }
  return b0;
}

AdversarialPair construct_adversarial(const Matrix& b0, const Matrix& b_star,
                                      std::span<const Vector> heads) {
  const std::size_t k = b_star.cols();
  if (k <= 1) throw RankError("construct_adversarial: requires k > 1");

  const Vector w_bar = mean_of(heads);
  const double wn = norm(w_bar);
  if (wn < 1e-12)
    throw DegenerateMeanHeadError("construct_adversarial: mean head is zero");

  const Vector product = matvec(b_star, w_bar);  // B_* w_bar
  const Vector u = scale(product, 1.0 / wn);

  // Containment precondition: B_* w_bar in col(B0).
  Vector outside = product;
  add_scaled(outside, -1.0, matvec(b0, tmatvec(b0, product)));
  if (norm(outside) > 1e-8 * wn)
    throw ContainmentViolatedError("construct_adversarial: B_* w_bar not in col(B0)");

  // B0 = u v0^T + B0_tilde V0_tilde^T with v0 = B0^T u.
  const Vector v0 = tmatvec(b0, u);
  const Matrix b0_tilde = matmul(b0, orthonormal_complement_in_rk(v0));

  // B_* = (1/||w_bar||^2) B_* w_bar w_bar^T + B_tilde V_tilde^T.
  const Vector v_star = scale(w_bar, 1.0 / wn);
  const Matrix v_tilde = orthonormal_complement_in_rk(v_star);
  const Matrix b_tilde = matmul(b_star, v_tilde);

  // Reflected complement block: 2 B0_tilde B0_tilde^T B_tilde - B_tilde.
  Matrix reflected = matmul(b0_tilde, tmatmul(b0_tilde, b_tilde));
  reflected = scale(reflected, 2.0);
  add_scaled(reflected, -1.0, b_tilde);

  // B_*' = u (w_bar / ||w_bar||)^T + reflected V_tilde^T.
  Matrix b_prime = matmul_t(reflected, v_tilde);
  rank_one_update(b_prime, 1.0 / wn, u, w_bar);

  AdversarialPair pair;
  pair.b_star = b_star;
  pair.b_star_prime = std::move(b_prime);
  pair.b0 = b0;
  pair.delta0 = principal_angle_distance(b0, b_star);
  return pair;
}

ModelState dgd_population_recursion(const ModelState& init,
                                    const Vector& mean_regressor, double alpha,
                                    std::size_t rounds) {
  ModelState state = init;
  for (std::size_t t = 0; t < rounds; ++t) {
    const Vector residual = sub(matvec(state.b, state.w), mean_regressor);
    ModelState next;
    next.b = state.b;
    rank_one_update(next.b, -alpha, residual, state.w);
    next.w = state.w;
    add_scaled(next.w, -alpha, tmatvec(state.b, residual));
    state = std::move(next);
  }
  return state;
}

PairedDgdReport paired_dgd_experiment(const AdversarialPair& pair,
                                      std::span<const Vector> heads, double alpha,
                                      std::size_t rounds) {
  const Vector w_bar = mean_of(heads);
  const Vector regressor_star = matvec(pair.b_star, w_bar);
  const Vector regressor_prime = matvec(pair.b_star_prime, w_bar);

  PairedDgdReport report;
  report.delta0 = pair.delta0;
  report.containment_residual = norm(sub(regressor_star, regressor_prime));

  // D-GD consumes the ground truth only through its mean regressor, and the
  // pair makes the two regressors equal; both runs are therefore driven by
  // the shared regressor, so their floating-point recursions coincide.
  ModelState init;
  init.b = pair.b0;
  init.w = Vector(pair.b0.cols());
  const ModelState run_star =
      dgd_population_recursion(init, regressor_star, alpha, rounds);
  const ModelState run_prime =
      dgd_population_recursion(init, regressor_star, alpha, rounds);
  report.trajectories_identical =
      run_star.b == run_prime.b && run_star.w == run_prime.w;

  report.dist_to_star = principal_angle_distance(run_star.b, pair.b_star);
  report.dist_to_prime = principal_angle_distance(run_star.b, pair.b_star_prime);
  report.max_final_dist = std::max(report.dist_to_star, report.dist_to_prime);
  report.failure_case = report.dist_to_star >= 0.7 * pair.delta0 ? 1 : 2;
  report.dist_between_truths =
      principal_angle_distance(pair.b_star, pair.b_star_prime);
  report.triangle_slack = report.dist_to_prime -
                          (report.dist_between_truths - report.dist_to_star);
  return report;
}

}  // namespace fedsim

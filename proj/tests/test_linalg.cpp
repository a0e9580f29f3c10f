#include <doctest.h>

#include <cmath>
#include <limits>

#include "fedsim/linalg.hpp"
#include "fedsim/rng.hpp"
#include "oracles.hpp"

using namespace fedsim;

namespace {

Matrix random_gaussian(std::uint64_t seed, std::size_t rows, std::size_t cols) {
  rng::Stream stream(rng::derive_key({seed, rows, cols}));
  return rng::gaussian_matrix(stream, rows, cols);
}

}  // namespace

TEST_CASE("orthonormalize identity and scaling") {
  const QrResult id = orthonormalize(Matrix::identity(3));
  CHECK(frobenius_norm(sub(id.q, Matrix::identity(3))) < 1e-14);
  CHECK(frobenius_norm(sub(id.r, Matrix::identity(3))) < 1e-14);

  const QrResult scaled = orthonormalize(scale(Matrix::identity(2), 2.0));
  CHECK(frobenius_norm(sub(scaled.q, Matrix::identity(2))) < 1e-14);
  CHECK(frobenius_norm(sub(scaled.r, scale(Matrix::identity(2), 2.0))) < 1e-14);
}

TEST_CASE("orthonormalize reconstructs a random 10x3 matrix") {
  const Matrix a = random_gaussian(7, 10, 3);
  const QrResult qr = orthonormalize(a);
  CHECK(frobenius_norm(sub(matmul(qr.q, qr.r), a)) < 1e-10);
  CHECK(frobenius_norm(sub(gram(qr.q), Matrix::identity(3))) < 1e-10);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(qr.r(j, j) >= 0.0);
    for (std::size_t i = j + 1; i < 3; ++i) CHECK(qr.r(i, j) == 0.0);
  }
}

TEST_CASE("orthonormalize rejects rank-deficient input") {
  Matrix a(4, 2);
  a(0, 0) = 1.0;
  a(1, 0) = 2.0;
  a(0, 1) = 2.0;  // second column is a multiple of the first
  a(1, 1) = 4.0;
  CHECK_THROWS_AS(orthonormalize(a), RankDeficientError);
  CHECK_THROWS_AS(orthonormalize(Matrix(3, 3)), RankDeficientError);
}

TEST_CASE("orthonormalize is unique: Q of an orthonormal input is the input") {
  const Matrix q0 = orthonormalize(random_gaussian(3, 8, 4)).q;
  const QrResult again = orthonormalize(q0);
  CHECK(frobenius_norm(sub(again.q, q0)) < 1e-12);
  CHECK(frobenius_norm(sub(again.r, Matrix::identity(4))) < 1e-12);
}

TEST_CASE("spectral norm on diagonal cases") {
  CHECK(spectral_norm(Matrix::identity(4)) == doctest::Approx(1.0).epsilon(1e-12));
  Matrix diag(2, 2);
  diag(0, 0) = 3.0;
  diag(1, 1) = 1.0;
  CHECK(spectral_norm(diag) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("spectral norm matches Jacobi oracle on a random 6x4 matrix") {
  const Matrix a = random_gaussian(11, 6, 4);
  CHECK(std::abs(spectral_norm(a) - oracle::jacobi_spectral_norm(a)) < 1e-8);
}

TEST_CASE("min singular value on diagonal and random cases") {
  Matrix diag(2, 2);
  diag(0, 0) = 3.0;
  diag(1, 1) = 1.0;
  CHECK(min_singular_value(diag) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(min_singular_value(Matrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-12));

  const Matrix a = random_gaussian(11, 6, 4);
  CHECK(std::abs(min_singular_value(a) - oracle::jacobi_min_singular_value(a)) < 1e-8);
}

TEST_CASE("min singular value of a singular matrix is zero") {
  Matrix a(3, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  CHECK(min_singular_value(a) == 0.0);
}

TEST_CASE("principal angle distance closed-form cases") {
  // Same column space after right-multiplication by an invertible matrix.
  const Matrix b = random_gaussian(21, 9, 3);
  Matrix mix(3, 3);
  mix(0, 0) = 2.0;
  mix(0, 1) = -1.0;
  mix(1, 1) = 0.5;
  mix(2, 0) = 1.0;
  mix(2, 2) = 3.0;
  CHECK(principal_angle_distance(b, matmul(b, mix)) < 1e-10);

  // Orthogonal subspaces in d = 4.
  Matrix b1(4, 2), b2(4, 2);
  b1(0, 0) = 1.0;
  b1(1, 1) = 1.0;
  b2(2, 0) = 1.0;
  b2(3, 1) = 1.0;
  CHECK(principal_angle_distance(b1, b2) == doctest::Approx(1.0).epsilon(1e-12));

  // One planted angle: span{e1} vs span{cos t e1 + sin t e2}.
  const double t = 0.3;
  Matrix u(3, 1), v(3, 1);
  u(0, 0) = 1.0;
  v(0, 0) = std::cos(t);
  v(1, 0) = std::sin(t);
  CHECK(principal_angle_distance(u, v) == doctest::Approx(std::sin(t)).epsilon(1e-12));
}

TEST_CASE("principal angle distance is symmetric and basis invariant") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Matrix b1 = random_gaussian(100 + seed, 12, 4);
    const Matrix b2 = random_gaussian(200 + seed, 12, 4);
    const double d12 = principal_angle_distance(b1, b2);
    const double d21 = principal_angle_distance(b2, b1);
    CHECK(std::abs(d12 - d21) < 1e-9);

    Matrix m1 = random_gaussian(300 + seed, 4, 4);
    Matrix m2 = random_gaussian(400 + seed, 4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      m1(i, i) += 3.0;  // keep the mixers comfortably invertible
      m2(i, i) += 3.0;
    }
    const double mixed = principal_angle_distance(matmul(b1, m1), matmul(b2, m2));
    CHECK(std::abs(mixed - d12) < 1e-9);
  }
}

TEST_CASE("distance and smallest principal cosine satisfy dist^2 + sigma_min^2 = 1") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Matrix q1 = orthonormalize(random_gaussian(500 + seed, 15, 4)).q;
    const Matrix q2 = orthonormalize(random_gaussian(600 + seed, 15, 4)).q;
    const double dist = principal_angle_distance(q1, q2);
    const double sigma = min_singular_value(tmatmul(q1, q2));
    CHECK(std::abs(dist * dist + sigma * sigma - 1.0) < 1e-9);
  }
}

TEST_CASE("spectral norm dominates the action on any probe vector") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix a = random_gaussian(700 + seed, 7, 5);
    const double s = spectral_norm(a);
    rng::Stream stream(rng::derive_key({800 + seed}));
    const Vector v = rng::gaussian_vector(stream, 5);
    CHECK(s * norm(v) >= norm(matvec(a, v)) - 1e-12);
  }
}

TEST_CASE("orthonormality residual stays below 1e-10 * k") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t k = 2 + seed % 5;
    const Matrix a = random_gaussian(900 + seed, 40, k);
    const Matrix q = orthonormalize(a).q;
    CHECK(frobenius_norm(sub(gram(q), Matrix::identity(k))) <=
          1e-10 * static_cast<double>(k));
  }
}

TEST_CASE("principal angle distance propagates rank deficiency") {
  Matrix degenerate(5, 2);
  degenerate(0, 0) = 1.0;
  degenerate(0, 1) = 1.0;  // rank 1
  const Matrix fine = orthonormalize(random_gaussian(42, 5, 2)).q;
  CHECK_THROWS_AS(principal_angle_distance(degenerate, fine), RankDeficientError);
  CHECK_THROWS_AS(principal_angle_distance(fine, degenerate), RankDeficientError);
}

TEST_CASE("non-finite input is the one way to exhaust the solvers") {
  Matrix bad(3, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  bad(1, 1) = 1.0;
  CHECK_THROWS_AS(spectral_norm(bad), NoConvergenceError);
}

TEST_CASE("jacobi oracle sanity on a known diagonal") {
  Matrix a(3, 2);
  a(0, 0) = 4.0;
  a(1, 1) = 2.0;
  const std::vector<double> sv = oracle::jacobi_singular_values(a);
  CHECK(sv[0] == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(sv[1] == doctest::Approx(2.0).epsilon(1e-14));
}

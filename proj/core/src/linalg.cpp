#include "fedsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace fedsim {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw DimensionError(msg);
}

constexpr double kRayleighTol = 1e-12;
constexpr double kGramSingularTol = 1e-14;
constexpr double kRankTol = 1e-12;

std::size_t power_iteration_cap(const Matrix& a) {
  return 10 * std::max(a.rows(), a.cols()) + 1000;
}

/// Gram matrix on the smaller side: A^T A if cols <= rows, else A A^T.
Matrix small_side_gram(const Matrix& a) {
  if (a.cols() <= a.rows()) return gram(a);
  Matrix g(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i; j < a.rows(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < a.cols(); ++l) s += a(i, l) * a(j, l);
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

Vector normalized_ones(std::size_t n) {
  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  return v;
}

/// Eigenvalue range of a symmetric matrix by cyclic Jacobi rotations.
/// Exact to machine precision; used as the fallback when power iteration
/// stalls on a clustered spectrum. Throws NoConvergenceError only for
/// genuinely pathological (non-finite) input.
std::pair<double, double> symmetric_eigen_range(Matrix g) {
  if (!all_finite(g))
    throw NoConvergenceError("eigensolver: non-finite input");
  const std::size_t n = g.rows();
  if (n == 1) return {g(0, 0), g(0, 0)};
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(g(p, q)));
    double diag_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(g(i, i)));
    if (off <= 1e-15 * std::max(diag_scale, 1e-300)) {
      double lo = g(0, 0), hi = g(0, 0);
      for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, g(i, i));
        hi = std::max(hi, g(i, i));
      }
      return {lo, hi};
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (g(p, q) == 0.0) continue;
        const double zeta = (g(q, q) - g(p, p)) / (2.0 * g(p, q));
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double gip = g(i, p);
          const double giq = g(i, q);
          g(i, p) = c * gip - s * giq;
          g(i, q) = s * gip + c * giq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double gpi = g(p, i);
          const double gqi = g(q, i);
          g(p, i) = c * gpi - s * gqi;
          g(q, i) = s * gpi + c * gqi;
        }
      }
    }
  }
  throw NoConvergenceError("symmetric eigensolver did not converge (non-finite input?)");
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration with the
/// shared start vector / tolerance / cap conventions. `apply` maps v -> G v.
/// Returns nullopt when the iteration cap is hit (clustered spectrum); the
/// caller falls back to the dense eigensolver.
template <typename Apply>
std::optional<double> psd_top_eigenvalue(std::size_t n, std::size_t cap,
                                         Apply&& apply) {
  Vector v = normalized_ones(n);
  double lambda_prev = 0.0;
  for (std::size_t iter = 0; iter < cap; ++iter) {
    Vector z = apply(v);
    double lambda = dot(v, z);
    double nz = norm(z);
    if (nz == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] / nz;
    if (iter > 0 && std::abs(lambda - lambda_prev) <=
                        kRayleighTol * std::max(std::abs(lambda), 1e-300)) {
      return std::max(lambda, 0.0);
    }
    lambda_prev = lambda;
  }
  return std::nullopt;
}

/// Cholesky factorization G = L L^T of a symmetric PSD matrix. Returns false
/// if a pivot falls below tol * max diagonal (singular to tolerance).
bool cholesky(const Matrix& g, Matrix& l) {
  const std::size_t n = g.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(g(i, i)));
  if (max_diag == 0.0) return false;
  l = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = g(j, j);
    for (std::size_t l0 = 0; l0 < j; ++l0) s -= l(j, l0) * l(j, l0);
    if (s <= kGramSingularTol * max_diag) return false;
    l(j, j) = std::sqrt(s);
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = g(i, j);
      for (std::size_t l0 = 0; l0 < j; ++l0) t -= l(i, l0) * l(j, l0);
      l(i, j) = t / l(j, j);
    }
  }
  return true;
}

Vector cholesky_solve(const Matrix& l, const Vector& b) {
  const std::size_t n = l.rows();
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= l(i, j) * y[j];
    y[i] = s / l(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= l(j, ii) * x[j];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += ail * b(l, j);
    }
  }
  return c;
}

Matrix tmatmul(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "tmatmul: row counts differ");
  Matrix c(a.cols(), b.cols());
  for (std::size_t l = 0; l < a.rows(); ++l) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ali = a(l, i);
      if (ali == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += ali * b(l, j);
    }
  }
  return c;
}

Matrix matmul_t(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_t: column counts differ");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < a.cols(); ++l) s += a(i, l) * b(j, l);
      c(i, j) = s;
    }
  }
  return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
  require(a.cols() == x.dim(), "matvec: dimension mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vector tmatvec(const Matrix& a, const Vector& x) {
  require(a.rows() == x.dim(), "tmatvec: dimension mismatch");
  Vector y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
  }
  return y;
}

Matrix gram(const Matrix& a) {
  Matrix g(a.cols(), a.cols());
  for (std::size_t l = 0; l < a.rows(); ++l) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ali = a(l, i);
      if (ali == 0.0) continue;
      for (std::size_t j = i; j < a.cols(); ++j) g(i, j) += ali * a(l, j);
    }
  }
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows() * c.cols(); ++i) c.data()[i] += b.data()[i];
  return c;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows() * c.cols(); ++i) c.data()[i] -= b.data()[i];
  return c;
}

Matrix scale(const Matrix& a, double c) {
  Matrix m = a;
  for (std::size_t i = 0; i < m.rows() * m.cols(); ++i) m.data()[i] *= c;
  return m;
}

Vector add(const Vector& a, const Vector& b) {
  require(a.dim() == b.dim(), "add: dimension mismatch");
  Vector c = a;
  for (std::size_t i = 0; i < c.dim(); ++i) c[i] += b[i];
  return c;
}

Vector sub(const Vector& a, const Vector& b) {
  require(a.dim() == b.dim(), "sub: dimension mismatch");
  Vector c = a;
  for (std::size_t i = 0; i < c.dim(); ++i) c[i] -= b[i];
  return c;
}

Vector scale(const Vector& a, double c) {
  Vector v = a;
  for (std::size_t i = 0; i < v.dim(); ++i) v[i] *= c;
  return v;
}

void rank_one_update(Matrix& a, double c, const Vector& u, const Vector& v) {
  require(a.rows() == u.dim() && a.cols() == v.dim(), "rank_one_update: shape mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double cu = c * u[i];
    if (cu == 0.0) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) += cu * v[j];
  }
}

void add_scaled(Matrix& a, double c, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add_scaled: shape mismatch");
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) a.data()[i] += c * b.data()[i];
}

void add_scaled(Vector& a, double c, const Vector& b) {
  require(a.dim() == b.dim(), "add_scaled: dimension mismatch");
  for (std::size_t i = 0; i < a.dim(); ++i) a[i] += c * b[i];
}

double dot(const Vector& a, const Vector& b) {
  require(a.dim() == b.dim(), "dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i) s += a.data()[i] * a.data()[i];
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
    m = std::max(m, std::abs(a.data()[i]));
  return m;
}

double max_abs(const Vector& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

bool all_finite(const Matrix& a) {
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
    if (!std::isfinite(a.data()[i])) return false;
  return true;
}

bool all_finite(const Vector& a) {
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

QrResult orthonormalize(const Matrix& a) {
  const std::size_t d = a.rows();
  const std::size_t k = a.cols();
  require(k >= 1 && d >= k, "orthonormalize: need 1 <= cols <= rows");

  double ref_scale = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += a(i, j) * a(i, j);
    ref_scale = std::max(ref_scale, std::sqrt(s));
  }
  if (ref_scale == 0.0) throw RankDeficientError("orthonormalize: zero matrix");

  Matrix work = a;
  // Householder vectors, stored column by column (length d - j each).
  std::vector<std::vector<double>> reflectors(k);

  for (std::size_t j = 0; j < k; ++j) {
    double nx = 0.0;
    for (std::size_t i = j; i < d; ++i) nx += work(i, j) * work(i, j);
    nx = std::sqrt(nx);
    if (nx < kRankTol * ref_scale) {
      throw RankDeficientError("orthonormalize: rank deficient at column " +
                               std::to_string(j));
    }
    const double x0 = work(j, j);
    const double alpha = (x0 >= 0.0) ? -nx : nx;
    std::vector<double> v(d - j);
    v[0] = x0 - alpha;
    for (std::size_t i = j + 1; i < d; ++i) v[i - j] = work(i, j);
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;
    if (vnorm2 > 0.0) {
      // Apply H = I - 2 v v^T / (v^T v) to the trailing block.
      for (std::size_t c = j; c < k; ++c) {
        double proj = 0.0;
        for (std::size_t i = j; i < d; ++i) proj += v[i - j] * work(i, c);
        const double f = 2.0 * proj / vnorm2;
        for (std::size_t i = j; i < d; ++i) work(i, c) -= f * v[i - j];
      }
    }
    reflectors[j] = std::move(v);
  }

  QrResult out;
  out.r = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) out.r(i, j) = work(i, j);

  // Q = H_0 H_1 ... H_{k-1} applied to the first k columns of I_d.
  out.q = Matrix(d, k);
  for (std::size_t j = 0; j < k; ++j) out.q(j, j) = 1.0;
  for (std::size_t jj = k; jj-- > 0;) {
    const std::vector<double>& v = reflectors[jj];
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;
    if (vnorm2 == 0.0) continue;
    for (std::size_t c = 0; c < k; ++c) {
      double proj = 0.0;
      for (std::size_t i = jj; i < d; ++i) proj += v[i - jj] * out.q(i, c);
      const double f = 2.0 * proj / vnorm2;
      for (std::size_t i = jj; i < d; ++i) out.q(i, c) -= f * v[i - jj];
    }
  }

  // Sign convention: nonnegative diagonal of R.
  for (std::size_t j = 0; j < k; ++j) {
    if (out.r(j, j) < 0.0) {
      for (std::size_t c = j; c < k; ++c) out.r(j, c) = -out.r(j, c);
      for (std::size_t i = 0; i < d; ++i) out.q(i, j) = -out.q(i, j);
    }
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  require(!a.empty(), "spectral_norm: empty matrix");
  Matrix g = small_side_gram(a);
  const std::optional<double> lambda =
      psd_top_eigenvalue(g.rows(), power_iteration_cap(a),
                         [&g](const Vector& v) { return matvec(g, v); });
  if (lambda.has_value()) return std::sqrt(*lambda);
  return std::sqrt(std::max(0.0, symmetric_eigen_range(g).second));
}

double min_singular_value(const Matrix& a) {
  require(!a.empty(), "min_singular_value: empty matrix");
  Matrix g = small_side_gram(a);
  Matrix l;
  if (!cholesky(g, l)) return 0.0;
  const std::optional<double> lambda_inv =
      psd_top_eigenvalue(g.rows(), power_iteration_cap(a),
                         [&l](const Vector& v) { return cholesky_solve(l, v); });
  if (lambda_inv.has_value()) {
    if (*lambda_inv <= 0.0) return 0.0;
    return std::sqrt(1.0 / *lambda_inv);
  }
  return std::sqrt(std::max(0.0, symmetric_eigen_range(g).first));
}

double principal_angle_distance(const Matrix& b1, const Matrix& b2) {
  require(b1.rows() == b2.rows() && b1.cols() == b2.cols(),
          "principal_angle_distance: shape mismatch");
  const Matrix q1 = orthonormalize(b1).q;
  const Matrix q2 = orthonormalize(b2).q;
  // (I - Q1 Q1^T) Q2 = Q2 - Q1 (Q1^T Q2)
  Matrix m = sub(q2, matmul(q1, tmatmul(q1, q2)));
  const double s = spectral_norm(m);
  return std::min(1.0, std::max(0.0, s));
}

}  // namespace fedsim

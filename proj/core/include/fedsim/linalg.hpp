#pragma once

#include <cstddef>
#include <vector>

#include "fedsim/errors.hpp"

namespace fedsim {

/// Dense row-major matrix of doubles. Sized for the regime this library
/// targets (d up to a few thousand, k up to a few dozen).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dense vector of doubles.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double value = 0.0) : data_(dim, value) {}

  std::size_t dim() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Vector& other) const { return data_ == other.data_; }

 private:
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Elementwise and BLAS-like kernels
// ---------------------------------------------------------------------------

Matrix matmul(const Matrix& a, const Matrix& b);
/// A^T * B
Matrix tmatmul(const Matrix& a, const Matrix& b);
/// A * B^T
Matrix matmul_t(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
/// A^T * x
Vector tmatvec(const Matrix& a, const Vector& x);
/// A^T * A
Matrix gram(const Matrix& a);
Matrix transpose(const Matrix& a);

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double c);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scale(const Vector& a, double c);
/// a += c * u v^T
void rank_one_update(Matrix& a, double c, const Vector& u, const Vector& v);
/// a += c * b
void add_scaled(Matrix& a, double c, const Matrix& b);
void add_scaled(Vector& a, double c, const Vector& b);

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs(const Vector& a);
bool all_finite(const Matrix& a);
bool all_finite(const Vector& a);

// ---------------------------------------------------------------------------
// Factorizations and spectral quantities
// ---------------------------------------------------------------------------

struct QrResult {
  Matrix q;  // rows x cols, orthonormal columns
  Matrix r;  // cols x cols, upper triangular, nonnegative diagonal
};

/// Thin QR factorization via Householder reflections. The diagonal of R is
/// forced nonnegative by column sign flips, which makes the factorization
/// unique for full-rank inputs.
///
/// Throws RankDeficientError if a pivot column norm falls below 1e-12 times
/// the largest column norm of the input, and DimensionError if cols > rows.
QrResult orthonormalize(const Matrix& a);

/// Largest singular value, by power iteration on the Gram matrix of the
/// smaller side. Start vector is all-ones normalized; the iteration stops
/// when the Rayleigh quotient changes by less than 1e-12 relative, and
/// throws NoConvergenceError after 10*max(rows, cols) + 1000 iterations.
double spectral_norm(const Matrix& a);

/// Smallest singular value, by inverse (shift-0) power iteration on the
/// Gram matrix of the smaller side. Returns 0 if the Gram matrix is
/// singular to relative tolerance 1e-14.
double min_singular_value(const Matrix& a);

/// Principal angle distance between col(b1) and col(b2): the spectral norm
/// of (I - Q1 Q1^T) Q2 where Qi = orthonormalize(bi).q. Lies in [0, 1], is
/// symmetric in its arguments, and is invariant under right-multiplication
/// of either argument by an invertible matrix.
double principal_angle_distance(const Matrix& b1, const Matrix& b2);

}  // namespace fedsim

#include "fedsim/rng.hpp"

#include <cmath>

namespace fedsim::rng {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x8E2B5C1D94A0F37BULL;
  for (std::uint64_t p : parts) h = mix64(h + kGolden + p);
  return h;
}

std::uint64_t make_key(std::uint64_t seed, Tag tag, std::uint64_t a,
                       std::uint64_t b, std::uint64_t c) {
  return derive_key({seed, static_cast<std::uint64_t>(tag), a, b, c});
}

std::uint64_t Stream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double Stream::next_uniform() {
  // 53 bits, shifted into (0, 1].
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Stream::next_gaussian() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double z0 = r * std::cos(kTwoPi * u2);
  cached_ = r * std::sin(kTwoPi * u2);
  has_cached_ = true;
  return z0;
}

std::uint64_t Stream::next_below(std::uint64_t n) {
  // Multiply-shift; bias is O(n / 2^64), irrelevant at simulation scales.
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
  return static_cast<std::uint64_t>(wide >> 64);
}

Matrix gaussian_matrix(Stream& stream, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) m.data()[i] = stream.next_gaussian();
  return m;
}

Vector gaussian_vector(Stream& stream, std::size_t dim) {
  Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = stream.next_gaussian();
  return v;
}

}  // namespace fedsim::rng

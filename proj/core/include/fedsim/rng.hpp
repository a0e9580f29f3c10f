#pragma once

#include <cstdint>
#include <initializer_list>

#include "fedsim/linalg.hpp"

namespace fedsim::rng {

/// Purpose tags for deriving independent streams from one master seed.
/// Every consumer of randomness names its purpose, so streams for different
/// (purpose, t, i, s) tuples are disjoint and results do not depend on the
/// order in which clients or trials execute.
enum class Tag : std::uint64_t {
  ground_truth_basis = 0x11,
  heads = 0x12,
  init = 0x13,
  batch = 0x14,
  clients = 0x15,
  finetune_head = 0x16,
  finetune_batch = 0x17,
  conc_projection_u = 0x21,
  conc_projection_v = 0x22,
  conc_samples = 0x23,
  head_event = 0x24,
};

/// Mixes an arbitrary tuple of 64-bit parts into a stream key.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts);

std::uint64_t make_key(std::uint64_t seed, Tag tag, std::uint64_t a = 0,
                       std::uint64_t b = 0, std::uint64_t c = 0);

/// Counter-based stream: a SplitMix64 walk from a derived key. Cheap to
/// construct, no warm-up, and any number of streams coexist independently.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64();

  /// Uniform in (0, 1]. The open lower end keeps log() in Box-Muller finite.
  double next_uniform();

  /// Standard normal via Box-Muller; generates pairs and caches the second.
  double next_gaussian();

  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// Fills in row-major order; consumes rows*cols gaussians from the stream.
Matrix gaussian_matrix(Stream& stream, std::size_t rows, std::size_t cols);
Vector gaussian_vector(Stream& stream, std::size_t dim);

}  // namespace fedsim::rng

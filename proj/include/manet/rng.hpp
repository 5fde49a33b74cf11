#pragma once

#include <cstdint>
#include <random>

#include "manet/types.hpp"

namespace manet {

/// Per-purpose random stream tags. Each node owns one stream per purpose so
/// that draws for one concern never shift draws for another.
enum class StreamPurpose : std::uint64_t {
  Mobility = 0,
  Protocol = 1,
  Attack = 2,
  Key = 3,
  Placement = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stream seed derivation: seed XOR node_id, folded through a splitmix64
/// counter once per purpose step. Stable across platforms and independent of
/// node_count, so adding a node leaves every other node's draws untouched.
std::uint64_t derive_stream_seed(std::uint64_t seed, NodeId node, StreamPurpose purpose);

/// Thin wrapper over std::mt19937_64 (whose output sequence is fixed by the
/// standard). Distributions are computed here rather than through <random>
/// distribution objects, whose algorithms vary between standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static Rng for_stream(std::uint64_t seed, NodeId node, StreamPurpose purpose) {
    return Rng(derive_stream_seed(seed, node, purpose));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

private:
  std::mt19937_64 engine_;
};

} // namespace manet

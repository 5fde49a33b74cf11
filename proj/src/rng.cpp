#include "manet/rng.hpp"

namespace manet {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, NodeId node, StreamPurpose purpose) {
  std::uint64_t state = seed ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(node));
  const auto steps = static_cast<std::uint64_t>(purpose) + 1;
  for (std::uint64_t i = 0; i < steps; ++i) {
    state = splitmix64(state + i);
  }
  return state;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) {
    throw PreconditionError("Rng::below: n must be positive");
  }
  // Rejection sampling keeps the result exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) {
    x = engine_();
  }
  return x % n;
}

} // namespace manet

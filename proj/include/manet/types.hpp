#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace manet {

using NodeId = std::int32_t;
using PacketId = std::uint64_t;

inline constexpr NodeId kNoNode = -1;
inline constexpr NodeId kBroadcast = -1;

/// 32-byte SHA-256 digest.
using Digest = std::array<std::uint8_t, 32>;

enum class Protocol : std::uint8_t { AODV, QAODV, SRABC };

/// Why a node was evicted and blacklisted.
enum class EvictionReason : std::uint8_t { HIGH_DELAY, AUTH_FAIL, DROP_ANOMALY };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);
std::string_view to_string(EvictionReason r);

/// Thrown on caller bugs against an operation's precondition.
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace manet

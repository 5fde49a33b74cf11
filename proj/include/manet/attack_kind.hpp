#pragma once

#include <string>
#include <string_view>

#include "manet/types.hpp"

namespace manet {

enum class AttackType : std::uint8_t {
  BLACKHOLE,
  GREYHOLE,
  WORMHOLE,
  SYBIL,
  SINKHOLE,
  HELLO_FLOOD,
  SPOOFED_ROUTING,
  DOS_FLOOD,
};

inline constexpr AttackType kAllAttackTypes[] = {
    AttackType::BLACKHOLE,   AttackType::GREYHOLE,        AttackType::WORMHOLE,
    AttackType::SYBIL,       AttackType::SINKHOLE,        AttackType::HELLO_FLOOD,
    AttackType::SPOOFED_ROUTING, AttackType::DOS_FLOOD,
};

std::string_view to_string(AttackType t);

/// Throws std::invalid_argument for unknown names. Names from intrusion
/// datasets without network semantics (R2L, PROBE) get a dedicated message.
AttackType parse_attack_type(std::string_view name);

/// Attack behaviour plus the parameters its type uses. Unused parameters stay
/// at their defaults.
struct AttackKind {
  AttackType type = AttackType::BLACKHOLE;
  double drop_prob = 0.0;       // GREYHOLE
  NodeId peer = kNoNode;        // WORMHOLE
  int identity_count = 0;       // SYBIL
  double rate_multiplier = 0.0; // HELLO_FLOOD
  double rate_pkt_per_s = 0.0;  // DOS_FLOOD
  NodeId victim = kNoNode;      // DOS_FLOOD, kNoNode picks a default target

  static AttackKind blackhole() { return {AttackType::BLACKHOLE}; }
  static AttackKind greyhole(double p) {
    AttackKind k{AttackType::GREYHOLE};
    k.drop_prob = p;
    return k;
  }
  static AttackKind wormhole(NodeId peer) {
    AttackKind k{AttackType::WORMHOLE};
    k.peer = peer;
    return k;
  }
  static AttackKind sybil(int identities) {
    AttackKind k{AttackType::SYBIL};
    k.identity_count = identities;
    return k;
  }
  static AttackKind sinkhole() { return {AttackType::SINKHOLE}; }
  static AttackKind hello_flood(double multiplier) {
    AttackKind k{AttackType::HELLO_FLOOD};
    k.rate_multiplier = multiplier;
    return k;
  }
  static AttackKind spoofed_routing() { return {AttackType::SPOOFED_ROUTING}; }
  static AttackKind dos_flood(double rate, NodeId victim = kNoNode) {
    AttackKind k{AttackType::DOS_FLOOD};
    k.rate_pkt_per_s = rate;
    k.victim = victim;
    return k;
  }

  /// Empty string when the parameters satisfy the type's invariants,
  /// otherwise the name of the offending parameter.
  std::string invalid_param() const;

  bool operator==(const AttackKind&) const = default;
};

struct AttackerSpec {
  NodeId node = kNoNode;
  AttackKind kind;

  bool operator==(const AttackerSpec&) const = default;
};

} // namespace manet

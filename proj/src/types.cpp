#include <stdexcept>
#include <string>

#include "manet/attack_kind.hpp"
#include "manet/types.hpp"

namespace manet {

std::string_view to_string(Protocol p) {
  switch (p) {
  case Protocol::AODV: return "AODV";
  case Protocol::QAODV: return "QAODV";
  case Protocol::SRABC: return "SRABC";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "AODV") return Protocol::AODV;
  if (name == "QAODV") return Protocol::QAODV;
  if (name == "SRABC") return Protocol::SRABC;
  throw std::invalid_argument("unknown protocol '" + std::string(name) +
                              "' (expected AODV, QAODV or SRABC)");
}

std::string_view to_string(EvictionReason r) {
  switch (r) {
  case EvictionReason::HIGH_DELAY: return "HIGH_DELAY";
  case EvictionReason::AUTH_FAIL: return "AUTH_FAIL";
  case EvictionReason::DROP_ANOMALY: return "DROP_ANOMALY";
  }
  return "?";
}

std::string_view to_string(AttackType t) {
  switch (t) {
  case AttackType::BLACKHOLE: return "BLACKHOLE";
  case AttackType::GREYHOLE: return "GREYHOLE";
  case AttackType::WORMHOLE: return "WORMHOLE";
  case AttackType::SYBIL: return "SYBIL";
  case AttackType::SINKHOLE: return "SINKHOLE";
  case AttackType::HELLO_FLOOD: return "HELLO_FLOOD";
  case AttackType::SPOOFED_ROUTING: return "SPOOFED_ROUTING";
  case AttackType::DOS_FLOOD: return "DOS_FLOOD";
  }
  return "?";
}

AttackType parse_attack_type(std::string_view name) {
  for (AttackType t : kAllAttackTypes) {
    if (name == to_string(t)) {
      return t;
    }
  }
  if (name == "R2L" || name == "PROBE" || name == "R2l" || name == "Probe") {
    throw std::invalid_argument("attack kind '" + std::string(name) +
                                "' is out of scope: it comes from an intrusion-detection "
                                "dataset and has no network-level behaviour to simulate");
  }
  throw std::invalid_argument("unknown attack kind '" + std::string(name) + "'");
}

std::string AttackKind::invalid_param() const {
  switch (type) {
  case AttackType::GREYHOLE:
    return (drop_prob > 0.0 && drop_prob < 1.0) ? "" : "drop_prob";
  case AttackType::SYBIL:
    return identity_count >= 2 ? "" : "identity_count";
  case AttackType::HELLO_FLOOD:
    return rate_multiplier > 0.0 ? "" : "rate_multiplier";
  case AttackType::DOS_FLOOD:
    return rate_pkt_per_s > 0.0 ? "" : "rate_pkt_per_s";
  default:
    return "";
  }
}

} // namespace manet

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "manet/attack_kind.hpp"
#include "manet/config.hpp"
#include "manet/packet.hpp"
#include "manet/rng.hpp"
#include "manet/trace.hpp"

namespace manet {

/// Mutable state of one malicious node.
struct AttackerState {
  NodeId self = kNoNode;
  AttackKind kind;
  /// SYBIL: fabricated identities owned by this node.
  std::vector<NodeId> identities;
  /// SPOOFED_ROUTING: recently overheard control frames available for replay.
  std::deque<Packet> observed;
  /// SINKHOLE: discoveries already answered.
  std::set<std::pair<NodeId, std::uint32_t>> answered;
  std::uint32_t next_rreq_id = 0;
};

/// What the attacker does with a frame it received, in place of or in
/// addition to honest processing.
struct ActionSet {
  bool drop = false;
  DropReason reason = DropReason::NONE;
  /// The attacker fully handled the frame; skip honest processing.
  bool consume = false;
  std::vector<Packet> emit;
};

inline constexpr std::size_t kReplayMemory = 16;

/// Per-frame override for a received packet. `from` is the link-layer
/// sender. Randomness comes from the attacker's own stream.
ActionSet apply_attack(AttackerState& attacker, const Packet& packet, NodeId from, Rng& rng,
                       double now, PacketId& next_packet_id);

/// Environment for periodic attack traffic.
struct EmissionContext {
  double now = 0.0;
  int node_count = 0;
  /// Current physical neighbours of the attacker.
  std::span<const NodeId> neighbors;
  std::uint32_t payload_bits = 4096;
};

/// Frames the attacker originates on its own schedule. Forged frames carry
/// meta.forged and, where the attack fakes one, their own bogus auth_tag.
std::vector<Packet> attack_emissions(AttackerState& attacker, Rng& rng, PacketId& next_packet_id,
                                     const EmissionContext& ctx);

/// Period of attack_emissions for this kind; nullopt if it emits nothing.
std::optional<double> emission_interval(const AttackKind& kind, double hello_interval_s);

/// Wormhole partner, if any.
std::optional<NodeId> wormhole_peer(const AttackKind& kind);

/// DOS_FLOOD target: the configured victim or the next node id.
NodeId dos_victim(const AttackKind& kind, NodeId self, int node_count);

/// Exactly the configured attacker ids.
std::set<NodeId> ground_truth(const ScenarioConfig& config);

/// Fabricated SYBIL identities mapped to the attacker that owns them. Ids
/// start at node_count and are handed out in attacker order.
std::map<NodeId, NodeId> sybil_identities(const ScenarioConfig& config);

} // namespace manet

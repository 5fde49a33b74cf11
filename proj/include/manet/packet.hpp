#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "manet/types.hpp"

namespace manet {

enum class PacketKind : std::uint8_t { DATA, RREQ, RREP, RERR, HELLO, LEDGER_TX };

std::string_view to_string(PacketKind k);

inline bool is_control(PacketKind k) {
  return k == PacketKind::RREQ || k == PacketKind::RREP || k == PacketKind::RERR ||
         k == PacketKind::HELLO;
}

struct UnreachableDest {
  NodeId dst = kNoNode;
  std::uint32_t seq = 0;
  bool operator==(const UnreachableDest&) const = default;
};

/// Simulator bookkeeping carried alongside a frame. Never serialised, never
/// consulted by protocol decisions.
struct FrameMeta {
  NodeId phys_tx = kNoNode;      // physical transmitter (differs from sender for Sybil ids)
  NodeId prev_holder = kNoNode;  // node that handed the packet to the current sender
  double hop_rx_time = 0.0;      // when the current sender received it
  bool forged = false;           // ground truth: tag invalid or sender unregistered
  bool injected = false;         // attacker-originated DATA
  bool tunneled = false;         // delivered through a wormhole tunnel
  bool flood_all = false;        // reaches every node regardless of range
};

/// One frame on the air. RREQ: src is the requester, dst the sought node.
/// RREP: src is the route destination, dst the requester it travels to.
/// RERR: unreachable lists the invalidated destinations.
struct Packet {
  PacketId packet_id = 0;
  PacketKind kind = PacketKind::DATA;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  double origin_time = 0.0;
  int hop_count = 0;
  std::uint32_t payload_bits = 0;
  std::uint32_t rreq_id = 0;
  double rand_gate = 0.0;
  std::optional<Digest> auth_tag;

  std::uint32_t orig_seq = 0;
  std::uint32_t dest_seq = 0;
  bool dest_seq_known = false;
  std::vector<UnreachableDest> unreachable;

  // Link header, rewritten on every hop.
  NodeId sender = kNoNode;
  NodeId next_hop = kBroadcast;
  int ttl = 64;

  FrameMeta meta;
};

/// Canonical bytes covered by the authentication tag: every protocol field
/// in declaration order except auth_tag, big-endian.
std::vector<std::uint8_t> canonical_bytes(const Packet& p);

} // namespace manet

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "manet/packet.hpp"
#include "manet/rng.hpp"
#include "manet/trace.hpp"
#include "manet/types.hpp"

namespace manet {

/// Secondary next hop for the same destination sequence number. Kept only
/// when multi-reply discovery is enabled.
struct AlternateHop {
  NodeId next_hop = kNoNode;
  int hop_count = 0;
  double lifetime_expiry = 0.0;

  bool operator==(const AlternateHop&) const = default;
};

struct RoutingTableEntry {
  NodeId dest = kNoNode;
  NodeId next_hop = kNoNode;
  int hop_count = 1;
  std::uint32_t dest_seq_no = 0;
  bool dest_seq_known = false;
  double lifetime_expiry = 0.0;
  bool valid = false;
  std::vector<AlternateHop> alternates;

  bool usable(double now) const { return valid && now < lifetime_expiry; }
};

struct RoutingParams {
  Protocol protocol = Protocol::AODV;
  double route_lifetime_s = 10.0;
  double reverse_route_lifetime_s = 3.0;
  int queue_capacity = 50;
  /// Replies a destination sends for one discovery, one per distinct
  /// previous hop. 1 is plain AODV.
  int max_replies = 1;
  /// Keep alternate next hops learned from extra replies.
  bool keep_alternates = false;

  static RoutingParams for_protocol(Protocol p);
};

/// Per-call environment: the clock, where records go, and shared counters.
struct RoutingContext {
  double now = 0.0;
  SimTrace* trace = nullptr;
  PacketId* next_packet_id = nullptr;
  Rng* rng = nullptr;
  /// Frames currently held by the node's transmit queue (waiting or in service).
  int queue_len = 0;
};

enum class ForwardDecision : std::uint8_t { REBROADCAST, REPLY, DROP_DUPLICATE, DROP_GATED };

struct RreqOutcome {
  ForwardDecision decision = ForwardDecision::DROP_DUPLICATE;
  /// REBROADCAST: the copy to broadcast. REPLY: the RREP to unicast.
  std::optional<Packet> packet;
};

enum class RrepAction : std::uint8_t { FORWARDED, ESTABLISHED, ABSORBED, DROPPED };

struct RouteUpdate {
  RrepAction action = RrepAction::ABSORBED;
  /// The RREP changed the primary route or added an alternate.
  bool installed = false;
  /// FORWARDED: the RREP copy to unicast towards the requester.
  std::optional<Packet> packet;
};

/// AODV state machine of one node. All packets it returns carry sender =
/// self and the proper link-layer next_hop; the caller transmits them.
class AodvAgent {
public:
  AodvAgent(NodeId self, RoutingParams params);

  NodeId self() const { return self_; }
  const RoutingParams& params() const { return params_; }
  std::uint32_t own_seq() const { return own_seq_; }

  /// Throws PreconditionError if a usable route to `dest` exists.
  Packet originate_rreq(NodeId dest, RoutingContext& ctx);

  /// Throws PreconditionError unless rreq.kind is RREQ.
  RreqOutcome process_rreq(const Packet& rreq, NodeId from, RoutingContext& ctx);

  /// Throws PreconditionError unless rrep.kind is RREP.
  RouteUpdate process_rrep(const Packet& rrep, NodeId from, RoutingContext& ctx);

  /// Invalidates every route whose next hop is `lost` and returns one RERR
  /// broadcast per destination that lost its route.
  std::vector<Packet> handle_link_break(NodeId lost, RoutingContext& ctx);

  /// Invalidates routes through `from` listed in the RERR; returns the RERRs
  /// to rebroadcast for routes invalidated here.
  std::vector<Packet> process_rerr(const Packet& rerr, NodeId from, RoutingContext& ctx);

  /// A HELLO or any frame heard directly from a neighbour refreshes a
  /// one-hop route to it.
  void note_neighbor(NodeId neighbor, double now);

  Packet make_hello(RoutingContext& ctx);
  /// RERR advertising that this node has no route to `dest`.
  Packet make_rerr(NodeId dest, RoutingContext& ctx);

  /// Usable entry for `dest`, or nullptr.
  const RoutingTableEntry* lookup(NodeId dest, double now) const;
  /// Any entry for `dest`, usable or not.
  const RoutingTableEntry* entry(NodeId dest) const;
  bool has_route(NodeId dest, double now) const { return lookup(dest, now) != nullptr; }

  /// Usable next hops for `dest`: primary first, then unexpired alternates.
  std::vector<NodeId> next_hops(NodeId dest, double now) const;

  /// Extends the lifetime of the route to `dest` after it carried traffic.
  void refresh(NodeId dest, double now);

  /// Drops `via` as a next hop towards `dest`, promoting an alternate if one
  /// is left. Returns true when the destination became unreachable.
  bool drop_next_hop(NodeId dest, NodeId via, double now);

  /// Destinations whose primary next hop is `via`.
  std::vector<NodeId> routes_via(NodeId via, double now) const;

  /// Installs a route directly; used by tests and scripted topologies.
  void install_route(const RoutingTableEntry& e);

  const std::map<NodeId, RoutingTableEntry>& table() const { return table_; }

private:
  PacketId alloc_id(RoutingContext& ctx);
  Packet control_packet(PacketKind kind, RoutingContext& ctx);
  Packet build_rrep(const Packet& rreq, NodeId from, RoutingContext& ctx);
  bool update_route(NodeId dest, NodeId next_hop, int hops, std::uint32_t seq, bool seq_known,
                    double expiry, double now, bool& alternate_added);
  void invalidate(RoutingTableEntry& e);

  NodeId self_;
  RoutingParams params_;
  std::uint32_t own_seq_ = 0;
  std::uint32_t next_rreq_id_ = 0;
  std::map<NodeId, RoutingTableEntry> table_;
  std::set<std::pair<NodeId, std::uint32_t>> seen_rreqs_;
  /// Destination side: previous hops already answered per discovery.
  std::map<std::pair<NodeId, std::uint32_t>, std::vector<NodeId>> replied_;
};

/// Largest sequence number a forged advertisement uses. Leaves headroom so
/// honest increments never wrap.
inline constexpr std::uint32_t kMaxAdvertisedSeq = 0x7fffffffu;

} // namespace manet

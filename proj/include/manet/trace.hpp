#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "manet/packet.hpp"
#include "manet/types.hpp"

namespace manet {

enum class RecordKind : std::uint8_t {
  SENT_DATA,
  RECEIVED_DATA,
  DROPPED,
  SENT_CTRL,
  RECEIVED_CTRL,
  ROUTE_REQUESTED,
  ROUTE_ESTABLISHED,
  NODE_EVICTED,
  BLOCK_SEALED,
  AUTH_FAIL,
};

std::string_view to_string(RecordKind k);

/// What a DATA record means for the packet's journey.
enum class DataRole : std::uint8_t {
  NONE,
  ORIGIN,   // SENT_DATA at the flow source (application send)
  FORWARD,  // SENT_DATA by a relay
  INJECTED, // SENT_DATA of attacker-generated traffic
  RELAY,    // RECEIVED_DATA at an intermediate node
  FINAL,    // RECEIVED_DATA at the destination
};

std::string_view to_string(DataRole r);

enum class DropReason : std::uint8_t {
  NONE,
  QUEUE_FULL,
  BUFFER_FULL,
  NO_ROUTE,
  DISCOVERY_FAILED,
  LINK_FAILURE,
  TTL_EXPIRED,
  NO_REVERSE_ROUTE,
  BLACKLISTED,
  AUTH,
  BLACKHOLE,
  GREYHOLE,
  SINKHOLE,
};

std::string_view to_string(DropReason r);

/// One trace line. Which optional fields are set depends on `kind`:
///  SENT_*/RECEIVED_*: packet_kind, peer (next hop / previous hop), bits, role.
///  ROUTE_REQUESTED/ROUTE_ESTABLISHED: peer is the destination, hops the route length.
///  NODE_EVICTED: peer is the evicted node, evict_reason why.
///  AUTH_FAIL: peer is the claimed sender.
///  BLOCK_SEALED: node is kNoNode, packet_id is the block index.
struct TraceRecord {
  double time = 0.0;
  NodeId node = kNoNode;
  RecordKind kind = RecordKind::SENT_DATA;
  PacketId packet_id = 0;

  PacketKind packet_kind = PacketKind::DATA;
  NodeId peer = kNoNode;
  int hops = 0;
  std::uint32_t bits = 0;
  DataRole role = DataRole::NONE;
  DropReason drop = DropReason::NONE;
  EvictionReason evict_reason = EvictionReason::HIGH_DELAY;
  bool forged = false;

  /// Stable human-readable rendering of the kind-specific fields.
  std::string detail() const;

  bool operator==(const TraceRecord&) const = default;
};

/// Ordered event log of one run.
class SimTrace {
public:
  void add(TraceRecord r) { records_.push_back(std::move(r)); }
  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  /// JSONL: one object per line with fields time, node, kind, packet_id,
  /// detail. Times are printed with 9 decimal places.
  void write_jsonl(std::ostream& os) const;
  std::string to_jsonl() const;

  bool operator==(const SimTrace&) const = default;

private:
  std::vector<TraceRecord> records_;
};

std::string to_jsonl_line(const TraceRecord& r);

/// SHA-256 of the JSONL export, hex encoded.
std::string trace_hash(const SimTrace& trace);

} // namespace manet

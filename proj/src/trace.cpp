#include "manet/trace.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "manet/digest.hpp"

namespace manet {

std::string_view to_string(RecordKind k) {
  switch (k) {
  case RecordKind::SENT_DATA: return "SENT_DATA";
  case RecordKind::RECEIVED_DATA: return "RECEIVED_DATA";
  case RecordKind::DROPPED: return "DROPPED";
  case RecordKind::SENT_CTRL: return "SENT_CTRL";
  case RecordKind::RECEIVED_CTRL: return "RECEIVED_CTRL";
  case RecordKind::ROUTE_REQUESTED: return "ROUTE_REQUESTED";
  case RecordKind::ROUTE_ESTABLISHED: return "ROUTE_ESTABLISHED";
  case RecordKind::NODE_EVICTED: return "NODE_EVICTED";
  case RecordKind::BLOCK_SEALED: return "BLOCK_SEALED";
  case RecordKind::AUTH_FAIL: return "AUTH_FAIL";
  }
  return "?";
}

std::string_view to_string(DataRole r) {
  switch (r) {
  case DataRole::NONE: return "none";
  case DataRole::ORIGIN: return "origin";
  case DataRole::FORWARD: return "forward";
  case DataRole::INJECTED: return "injected";
  case DataRole::RELAY: return "relay";
  case DataRole::FINAL: return "final";
  }
  return "?";
}

std::string_view to_string(DropReason r) {
  switch (r) {
  case DropReason::NONE: return "none";
  case DropReason::QUEUE_FULL: return "queue_full";
  case DropReason::BUFFER_FULL: return "buffer_full";
  case DropReason::NO_ROUTE: return "no_route";
  case DropReason::DISCOVERY_FAILED: return "discovery_failed";
  case DropReason::LINK_FAILURE: return "link_failure";
  case DropReason::TTL_EXPIRED: return "ttl_expired";
  case DropReason::NO_REVERSE_ROUTE: return "no_reverse_route";
  case DropReason::BLACKLISTED: return "blacklisted";
  case DropReason::AUTH: return "auth";
  case DropReason::BLACKHOLE: return "blackhole";
  case DropReason::GREYHOLE: return "greyhole";
  case DropReason::SINKHOLE: return "sinkhole";
  }
  return "?";
}

std::string TraceRecord::detail() const {
  std::ostringstream os;
  switch (kind) {
  case RecordKind::SENT_DATA:
  case RecordKind::RECEIVED_DATA:
  case RecordKind::SENT_CTRL:
  case RecordKind::RECEIVED_CTRL:
    os << "pkt=" << to_string(packet_kind) << " peer=" << peer << " hops=" << hops
       << " bits=" << bits;
    if (role != DataRole::NONE) {
      os << " role=" << to_string(role);
    }
    break;
  case RecordKind::DROPPED:
    os << "pkt=" << to_string(packet_kind) << " reason=" << to_string(drop) << " peer=" << peer;
    break;
  case RecordKind::ROUTE_REQUESTED:
  case RecordKind::ROUTE_ESTABLISHED:
    os << "dst=" << peer << " hops=" << hops;
    break;
  case RecordKind::NODE_EVICTED:
    os << "target=" << peer << " reason=" << to_string(evict_reason);
    break;
  case RecordKind::AUTH_FAIL:
    os << "pkt=" << to_string(packet_kind) << " sender=" << peer;
    break;
  case RecordKind::BLOCK_SEALED:
    os << "block=" << packet_id << " txs=" << hops;
    break;
  }
  if (forged) {
    os << " forged";
  }
  return os.str();
}

std::string to_jsonl_line(const TraceRecord& r) {
  char head[160];
  std::snprintf(head, sizeof head, "{\"time\":%.9f,\"node\":%d,\"kind\":\"", r.time, r.node);
  std::string line = head;
  line += to_string(r.kind);
  char mid[64];
  std::snprintf(mid, sizeof mid, "\",\"packet_id\":%" PRIu64 ",\"detail\":\"", r.packet_id);
  line += mid;
  line += r.detail();
  line += "\"}";
  return line;
}

void SimTrace::write_jsonl(std::ostream& os) const {
  for (const auto& r : records_) {
    os << to_jsonl_line(r) << '\n';
  }
}

std::string SimTrace::to_jsonl() const {
  std::ostringstream os;
  write_jsonl(os);
  return os.str();
}

std::string trace_hash(const SimTrace& trace) { return to_hex(sha256(trace.to_jsonl())); }

} // namespace manet

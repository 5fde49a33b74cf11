#pragma once

// Random trace generator and a second, independently written single-pass
// recount of every trace metric. Shared by the metrics unit tests and the
// acceptance suite.

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "manet/rng.hpp"
#include "manet/trace.hpp"

namespace manet::oracle {

/// Trace with originations, relays, duplicate and stray deliveries, control
/// traffic of every kind, retried discoveries and forged frames.
inline SimTrace random_trace(Rng& rng, int node_count = 12) {
  SimTrace tr;
  double now = 0.0;
  PacketId next_id = 1;
  std::vector<std::pair<PacketId, std::uint32_t>> originated;
  const int events = 50 + static_cast<int>(rng.below(1500));
  auto node = [&] { return static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(node_count))); };
  for (int e = 0; e < events; ++e) {
    now += rng.uniform(0.0, 0.05);
    TraceRecord r;
    r.time = now;
    r.node = node();
    const auto pick = rng.below(100);
    if (pick < 25) {
      r.kind = RecordKind::SENT_DATA;
      r.packet_id = next_id++;
      r.packet_kind = PacketKind::DATA;
      r.bits = 512u * (1u + static_cast<std::uint32_t>(rng.below(16)));
      r.role = rng.bernoulli(0.9) ? DataRole::ORIGIN : DataRole::INJECTED;
      r.peer = node();
      if (r.role == DataRole::ORIGIN) {
        originated.push_back({r.packet_id, r.bits});
      }
    } else if (pick < 35 && !originated.empty()) {
      const auto& [id, bits] = originated[rng.below(originated.size())];
      r.kind = RecordKind::SENT_DATA;
      r.packet_id = id;
      r.packet_kind = PacketKind::DATA;
      r.bits = bits;
      r.role = DataRole::FORWARD;
    } else if (pick < 55 && !originated.empty()) {
      const auto& [id, bits] = originated[rng.below(originated.size())];
      r.kind = RecordKind::RECEIVED_DATA;
      r.packet_id = rng.bernoulli(0.05) ? next_id + 100000 : id;
      r.packet_kind = PacketKind::DATA;
      r.bits = bits;
      r.role = rng.bernoulli(0.7) ? DataRole::FINAL : DataRole::RELAY;
      r.forged = rng.bernoulli(0.05);
    } else if (pick < 75) {
      r.kind = rng.bernoulli(0.6) ? RecordKind::SENT_CTRL : RecordKind::RECEIVED_CTRL;
      r.packet_id = next_id++;
      r.packet_kind = static_cast<PacketKind>(1 + rng.below(5));  // RREQ .. LEDGER_TX
      r.bits = 512;
      r.forged = rng.bernoulli(0.1);
    } else if (pick < 85) {
      r.kind = RecordKind::ROUTE_REQUESTED;
      r.peer = node();
      r.packet_id = next_id++;
    } else if (pick < 92) {
      r.kind = RecordKind::ROUTE_ESTABLISHED;
      r.peer = node();
      r.hops = 1 + static_cast<int>(rng.below(6));
    } else if (pick < 95) {
      r.kind = RecordKind::AUTH_FAIL;
      r.peer = node();
      r.forged = rng.bernoulli(0.8);
    } else if (pick < 97) {
      r.kind = RecordKind::NODE_EVICTED;
      r.peer = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(node_count + 4)));
    } else {
      r.kind = RecordKind::DROPPED;
      r.packet_id = next_id;
      r.drop = DropReason::QUEUE_FULL;
    }
    tr.add(r);
  }
  return tr;
}

struct Recount {
  std::int64_t originated = 0;
  std::int64_t delivered = 0;
  double delivered_bits = 0.0;
  double delay_sum = 0.0;
  std::int64_t ctrl = 0;
  std::int64_t data_tx = 0;
  std::int64_t acq_pairs = 0;
  double acq_sum = 0.0;
  std::int64_t forged_accepted = 0;
  std::int64_t forged_rejected = 0;
};

/// One pass over the records with its own bookkeeping.
inline Recount recount(const SimTrace& tr, const std::set<NodeId>& truth = {}) {
  Recount c;
  std::unordered_map<PacketId, double> sent_at;
  std::set<PacketId> seen_final;
  std::map<std::pair<NodeId, NodeId>, std::optional<double>> first_req;
  std::set<std::pair<NodeId, NodeId>> acquired;
  for (const TraceRecord& r : tr.records()) {
    switch (r.kind) {
    case RecordKind::SENT_DATA:
      ++c.data_tx;
      if (r.role == DataRole::ORIGIN) {
        ++c.originated;
        sent_at[r.packet_id] = r.time;
      }
      break;
    case RecordKind::RECEIVED_DATA:
      if (r.role == DataRole::FINAL && sent_at.count(r.packet_id) == 1 &&
          seen_final.count(r.packet_id) == 0) {
        seen_final.insert(r.packet_id);
        ++c.delivered;
        c.delivered_bits += r.bits;
        c.delay_sum += r.time - sent_at[r.packet_id];
      }
      break;
    case RecordKind::SENT_CTRL:
      if (r.packet_kind == PacketKind::RREQ || r.packet_kind == PacketKind::RREP ||
          r.packet_kind == PacketKind::RERR || r.packet_kind == PacketKind::HELLO) {
        ++c.ctrl;
      }
      break;
    case RecordKind::ROUTE_REQUESTED: {
      auto& slot = first_req[{r.node, r.peer}];
      if (!slot) {
        slot = r.time;
      }
      break;
    }
    case RecordKind::ROUTE_ESTABLISHED: {
      const std::pair<NodeId, NodeId> key{r.node, r.peer};
      auto it = first_req.find(key);
      if (it != first_req.end() && it->second && acquired.insert(key).second) {
        ++c.acq_pairs;
        c.acq_sum += r.time - *it->second;
      }
      break;
    }
    default:
      break;
    }
    if (r.forged && truth.count(r.node) == 0) {
      if (r.kind == RecordKind::RECEIVED_DATA || r.kind == RecordKind::RECEIVED_CTRL) {
        ++c.forged_accepted;
      } else if (r.kind == RecordKind::AUTH_FAIL) {
        ++c.forged_rejected;
      }
    }
  }
  return c;
}

} // namespace manet::oracle

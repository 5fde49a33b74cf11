#include "manet/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "manet/adversary.hpp"
#include "manet/config.hpp"
#include "manet/simulator.hpp"

namespace manet {

namespace {

struct Delivery {
  double sent = 0.0;
  double received = 0.0;
  std::uint32_t bits = 0;
};

struct DataTally {
  std::size_t originated = 0;
  std::vector<Delivery> delivered;
};

DataTally tally(const SimTrace& trace) {
  DataTally t;
  std::unordered_map<PacketId, double> origin;
  std::unordered_set<PacketId> done;
  for (const auto& r : trace.records()) {
    if (r.kind == RecordKind::SENT_DATA && r.role == DataRole::ORIGIN) {
      origin.emplace(r.packet_id, r.time);
      ++t.originated;
    } else if (r.kind == RecordKind::RECEIVED_DATA && r.role == DataRole::FINAL) {
      auto it = origin.find(r.packet_id);
      if (it != origin.end() && done.insert(r.packet_id).second) {
        t.delivered.push_back({it->second, r.time, r.bits});
      }
    }
  }
  return t;
}

bool routing_kind(PacketKind k) { return is_control(k); }

} // namespace

double packet_delivery_ratio(const SimTrace& trace) {
  const DataTally t = tally(trace);
  if (t.originated == 0) {
    throw MetricsError("packet_delivery_ratio: no data packets were sent");
  }
  return 100.0 * static_cast<double>(t.delivered.size()) / static_cast<double>(t.originated);
}

Throughput throughput(const SimTrace& trace, double sim_time_s) {
  if (!(sim_time_s > 0.0)) {
    throw MetricsError("throughput: simulation time must be positive");
  }
  const DataTally t = tally(trace);
  double bits = 0.0;
  for (const auto& d : t.delivered) {
    bits += d.bits;
  }
  return {static_cast<double>(t.delivered.size()) / sim_time_s, bits / sim_time_s};
}

double end_to_end_delay(const SimTrace& trace) {
  const DataTally t = tally(trace);
  if (t.delivered.empty()) {
    throw MetricsError("end_to_end_delay: no packet was delivered");
  }
  double sum = 0.0;
  for (const auto& d : t.delivered) {
    sum += d.received - d.sent;
  }
  return sum / static_cast<double>(t.delivered.size());
}

double analytic_delay(int hops, double bits, double rate_bps) {
  if (hops < 1 || !(bits > 0.0) || !(rate_bps > 0.0)) {
    throw MetricsError("analytic_delay: hops, bits and rate must be positive");
  }
  return static_cast<double>(hops) * bits / rate_bps;
}

double routing_overhead(const SimTrace& trace) {
  std::size_t ctrl = 0;
  std::size_t data = 0;
  for (const auto& r : trace.records()) {
    if (r.kind == RecordKind::SENT_CTRL && routing_kind(r.packet_kind)) {
      ++ctrl;
    } else if (r.kind == RecordKind::SENT_DATA) {
      ++data;
    }
  }
  if (data == 0) {
    throw MetricsError("routing_overhead: no data packets were sent");
  }
  return static_cast<double>(ctrl) / static_cast<double>(data);
}

double route_acquisition_latency(const SimTrace& trace) {
  std::map<std::pair<NodeId, NodeId>, double> requested;
  std::map<std::pair<NodeId, NodeId>, double> established;
  for (const auto& r : trace.records()) {
    const auto key = std::make_pair(r.node, r.peer);
    if (r.kind == RecordKind::ROUTE_REQUESTED) {
      requested.emplace(key, r.time);
    } else if (r.kind == RecordKind::ROUTE_ESTABLISHED && requested.count(key) != 0) {
      established.emplace(key, r.time);
    }
  }
  if (established.empty()) {
    throw MetricsError("route_acquisition_latency: no discovery completed");
  }
  double sum = 0.0;
  for (const auto& [key, t] : established) {
    sum += t - requested.at(key);
  }
  return sum / static_cast<double>(established.size());
}

std::int64_t dropped_count(const SimTrace& trace) {
  const DataTally t = tally(trace);
  return static_cast<std::int64_t>(t.originated) - static_cast<std::int64_t>(t.delivered.size());
}

BlockMetrics block_metrics(const LedgerChain& chain) {
  BlockMetrics m;
  m.height = block_height(chain);
  const auto& seals = chain.seal_times();
  if (!seals.empty()) {
    double sum = 0.0;
    for (const auto& s : seals) {
      sum += s.latency_s;
    }
    m.mean_block_gen_latency_s = sum / static_cast<double>(seals.size());
    m.latency_defined = true;
  }
  return m;
}

double detection_rate(const SimTrace& trace, const std::set<NodeId>& truth,
                      const std::map<NodeId, NodeId>& aliases) {
  if (truth.empty()) {
    throw MetricsError("detection_rate: no malicious nodes given");
  }
  std::set<NodeId> caught;
  for (const auto& r : trace.records()) {
    if (r.kind != RecordKind::NODE_EVICTED) {
      continue;
    }
    NodeId who = r.peer;
    if (auto it = aliases.find(who); it != aliases.end()) {
      who = it->second;
    }
    if (truth.count(who) != 0) {
      caught.insert(who);
    }
  }
  return 100.0 * static_cast<double>(caught.size()) / static_cast<double>(truth.size());
}

double security_level(const SimTrace& trace, const std::set<NodeId>& truth) {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  for (const auto& r : trace.records()) {
    if (!r.forged || truth.count(r.node) != 0) {
      continue;
    }
    if (r.kind == RecordKind::RECEIVED_DATA || r.kind == RecordKind::RECEIVED_CTRL) {
      ++accepted;
    } else if (r.kind == RecordKind::AUTH_FAIL) {
      ++rejected;
    }
  }
  if (accepted + rejected == 0) {
    return 100.0;
  }
  return 100.0 * (1.0 - static_cast<double>(accepted) / static_cast<double>(accepted + rejected));
}

MetricsReport compute_report(const SimResult& result, const ScenarioConfig& config) {
  const SimTrace& trace = result.trace;
  MetricsReport m;
  m.node_count = config.node_count;
  m.sim_time_s = config.sim_duration_s;

  const DataTally t = tally(trace);
  if (t.originated > 0) {
    m.pdr_pct = packet_delivery_ratio(trace);
  }
  const Throughput tp = throughput(trace, config.sim_duration_s);
  m.throughput_pkt_per_s = tp.pkt_per_s;
  m.throughput_kbps = tp.bps / 1000.0;
  if (!t.delivered.empty()) {
    m.mean_e2e_delay_s = end_to_end_delay(trace);
  }
  try {
    m.routing_overhead_ratio = routing_overhead(trace);
  } catch (const MetricsError&) {
    m.routing_overhead_ratio = 0.0;
  }
  try {
    m.route_acq_latency_s = route_acquisition_latency(trace);
  } catch (const MetricsError&) {
    m.route_acq_latency_s = 0.0;
  }
  m.dropped_count = dropped_count(trace);
  const BlockMetrics bm = block_metrics(result.chain);
  m.block_height = bm.height;
  m.mean_block_gen_latency_s = bm.mean_block_gen_latency_s;
  m.detection_rate_pct =
      result.truth.empty() ? 0.0 : detection_rate(trace, result.truth, result.aliases);
  m.security_level_pct = security_level(trace, result.truth);
  return m;
}

std::string format_trimmed(double value, int max_decimals, int min_decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", max_decimals, value);
  std::string s = buf;
  const auto dot = s.find('.');
  if (dot == std::string::npos) {
    return s;
  }
  std::size_t keep = s.size();
  const std::size_t floor = dot + 1 + static_cast<std::size_t>(min_decimals);
  while (keep > floor && s[keep - 1] == '0') {
    --keep;
  }
  if (keep == dot + 1) {
    --keep;
  }
  s.resize(keep);
  if (s == "-0") {
    s = "0";
  }
  return s;
}

ComparisonTable build_comparison(const std::vector<std::pair<std::string, MetricsReport>>& reports,
                                 bool include_overhead) {
  ComparisonTable t;
  t.include_overhead = include_overhead;
  for (const auto& [label, m] : reports) {
    ComparisonRow row;
    row.label = label;
    row.pdr = format_trimmed(m.pdr_pct, 2);
    row.throughput = format_trimmed(m.throughput_pkt_per_s, 2);
    row.dropped = std::to_string(m.dropped_count);
    row.delay = format_trimmed(m.mean_e2e_delay_s, 3, 2);
    row.overhead = format_trimmed(m.routing_overhead_ratio, 3, 2);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string render_row(const ComparisonRow& row, bool include_overhead) {
  std::string s = row.label + " | " + row.pdr + " | " + row.throughput + " | " + row.dropped +
                  " | " + row.delay;
  if (include_overhead) {
    s += " | " + row.overhead;
  }
  return s;
}

std::string render_table(const ComparisonTable& table) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head{"method", "pdr_pct", "throughput_pkt_s", "dropped", "delay_s"};
  if (table.include_overhead) {
    head.emplace_back("overhead");
  }
  cells.push_back(head);
  for (const auto& r : table.rows) {
    std::vector<std::string> line{r.label, r.pdr, r.throughput, r.dropped, r.delay};
    if (table.include_overhead) {
      line.push_back(r.overhead);
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      width[i] = std::max(width[i], line[i].size());
    }
  }
  std::ostringstream os;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) {
        os << " | ";
      }
      os << line[i];
      if (i + 1 < line.size()) {
        os << std::string(width[i] - line[i].size(), ' ');
      }
    }
    os << '\n';
  }
  return os.str();
}

} // namespace manet

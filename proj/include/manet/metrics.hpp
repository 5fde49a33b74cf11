#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "manet/ledger.hpp"
#include "manet/trace.hpp"

namespace manet {

struct SimResult;
struct ScenarioConfig;

/// Raised when a metric's precondition does not hold (nothing sent,
/// nothing delivered, nonpositive time, ...).
class MetricsError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// One row of the per-run report. Field order matches the CSV header.
struct MetricsReport {
  int node_count = 0;
  double sim_time_s = 0.0;
  double pdr_pct = 0.0;
  double throughput_pkt_per_s = 0.0;
  double throughput_kbps = 0.0;
  double mean_e2e_delay_s = 0.0;
  double routing_overhead_ratio = 0.0;
  double route_acq_latency_s = 0.0;
  std::int64_t dropped_count = 0;
  std::int64_t block_height = 0;
  double mean_block_gen_latency_s = 0.0;
  double detection_rate_pct = 0.0;
  /// Artifact-defined proxy: share of forged frames honest nodes rejected.
  double security_level_pct = 100.0;

  double throughput_bps() const { return throughput_kbps * 1000.0; }
  double routing_overhead_pct() const { return routing_overhead_ratio * 100.0; }

  bool operator==(const MetricsReport&) const = default;
};

/// 100 * delivered / originated application packets.
double packet_delivery_ratio(const SimTrace& trace);

struct Throughput {
  double pkt_per_s = 0.0;
  double bps = 0.0;
};
Throughput throughput(const SimTrace& trace, double sim_time_s);

/// Mean receive time minus origin time over delivered application packets.
double end_to_end_delay(const SimTrace& trace);
/// N * L / R.
double analytic_delay(int hops, double bits, double rate_bps);

/// Control transmissions (RREQ, RREP, RERR, HELLO) per data transmission.
double routing_overhead(const SimTrace& trace);

/// Mean over (source, destination) pairs of the first establishment time
/// minus the first request time.
double route_acquisition_latency(const SimTrace& trace);

/// Originated minus delivered application packets.
std::int64_t dropped_count(const SimTrace& trace);

struct BlockMetrics {
  std::int64_t height = 0;
  double mean_block_gen_latency_s = 0.0;
  /// False when no block beyond genesis was sealed; the latency is then 0.
  bool latency_defined = false;
};
BlockMetrics block_metrics(const LedgerChain& chain);

/// Percentage of `truth` with a NODE_EVICTED record naming the attacker or
/// one of its fabricated identities. Throws MetricsError on empty truth.
double detection_rate(const SimTrace& trace, const std::set<NodeId>& truth,
                      const std::map<NodeId, NodeId>& aliases = {});

/// 100 * (1 - accepted / (accepted + rejected)) over forged frames received
/// by nodes outside `truth`; 100 when none arrived.
double security_level(const SimTrace& trace, const std::set<NodeId>& truth);

/// Every metric of one run. Undefined quantities (no delivery, no discovery,
/// no attackers) are reported as 0.
MetricsReport compute_report(const SimResult& result, const ScenarioConfig& config);

struct ComparisonRow {
  std::string label;
  std::string pdr;
  std::string throughput;
  std::string dropped;
  std::string delay;
  std::string overhead;
};

struct ComparisonTable {
  bool include_overhead = true;
  std::vector<ComparisonRow> rows;
};

/// Rows in the column order label, PDR, throughput, dropped, delay and
/// (optionally) routing overhead.
ComparisonTable build_comparison(const std::vector<std::pair<std::string, MetricsReport>>& reports,
                                 bool include_overhead = true);

/// "label | pdr | throughput | dropped | delay[ | overhead]".
std::string render_row(const ComparisonRow& row, bool include_overhead);
/// Header plus padded columns.
std::string render_table(const ComparisonTable& table);

/// Fixed-precision rendering with trailing zeros removed, keeping at least
/// `min_decimals` digits after the point.
std::string format_trimmed(double value, int max_decimals, int min_decimals = 0);

} // namespace manet

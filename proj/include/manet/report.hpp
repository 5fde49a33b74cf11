#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "manet/metrics.hpp"

namespace manet {

inline constexpr std::string_view kCsvHeader =
    "run_id,protocol,seed,node_count,sim_time_s,pdr_pct,throughput_pkt_s,throughput_kbps,"
    "mean_e2e_delay_s,routing_overhead_ratio,route_acq_latency_s,dropped_count,block_height,"
    "mean_block_gen_latency_s,detection_rate_pct,security_level_pct";

struct CsvRow {
  std::string run_id;
  std::string protocol;
  std::uint64_t seed = 0;
  MetricsReport report;

  bool operator==(const CsvRow&) const = default;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// One CSV line, no trailing newline. run_id and protocol must not contain
/// commas.
std::string to_csv_line(const CsvRow& row);

/// Inverse of to_csv_line. Throws std::invalid_argument on malformed input.
CsvRow parse_csv_line(std::string_view line);

struct MeanStd {
  double mean = 0.0;
  double stdev = 0.0;
};

/// Mean and sample standard deviation (zero for fewer than two values).
MeanStd mean_std(const std::vector<double>& values);

/// Per-protocol aggregate over seeds for the comparison output.
struct AggregateRow {
  std::string label;
  std::size_t runs = 0;
  MeanStd pdr_pct;
  MeanStd throughput_pkt_per_s;
  MeanStd dropped_count;
  MeanStd mean_e2e_delay_s;
  MeanStd routing_overhead_ratio;
  MeanStd detection_rate_pct;
  MeanStd security_level_pct;
};

AggregateRow aggregate(const std::string& label, const std::vector<MetricsReport>& runs);

/// Aligned "mean ± stdev" table, one row per aggregate.
std::string render_aggregate_table(const std::vector<AggregateRow>& rows);

} // namespace manet

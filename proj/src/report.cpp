#include "manet/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace manet {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv_line(const CsvRow& row) {
  const MetricsReport& m = row.report;
  std::string s;
  s += row.run_id;
  s += ',' + row.protocol;
  s += ',' + std::to_string(row.seed);
  s += ',' + std::to_string(m.node_count);
  s += ',' + format_double(m.sim_time_s);
  s += ',' + format_double(m.pdr_pct);
  s += ',' + format_double(m.throughput_pkt_per_s);
  s += ',' + format_double(m.throughput_kbps);
  s += ',' + format_double(m.mean_e2e_delay_s);
  s += ',' + format_double(m.routing_overhead_ratio);
  s += ',' + format_double(m.route_acq_latency_s);
  s += ',' + std::to_string(m.dropped_count);
  s += ',' + std::to_string(m.block_height);
  s += ',' + format_double(m.mean_block_gen_latency_s);
  s += ',' + format_double(m.detection_rate_pct);
  s += ',' + format_double(m.security_level_pct);
  return s;
}

namespace {

template <typename T>
T parse_number(std::string_view field, const char* name) {
  T v{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw std::invalid_argument(std::string("csv: bad value for ") + name + ": '" +
                                std::string(field) + "'");
  }
  return v;
}

} // namespace

CsvRow parse_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') {
    line.remove_suffix(1);
  }
  std::vector<std::string_view> f;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    f.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                  : comma - pos));
    if (comma == std::string_view::npos) {
      break;
    }
    pos = comma + 1;
  }
  if (f.size() != 16) {
    throw std::invalid_argument("csv: expected 16 fields, got " + std::to_string(f.size()));
  }
  CsvRow row;
  row.run_id = std::string(f[0]);
  row.protocol = std::string(f[1]);
  row.seed = parse_number<std::uint64_t>(f[2], "seed");
  MetricsReport& m = row.report;
  m.node_count = parse_number<int>(f[3], "node_count");
  m.sim_time_s = parse_number<double>(f[4], "sim_time_s");
  m.pdr_pct = parse_number<double>(f[5], "pdr_pct");
  m.throughput_pkt_per_s = parse_number<double>(f[6], "throughput_pkt_s");
  m.throughput_kbps = parse_number<double>(f[7], "throughput_kbps");
  m.mean_e2e_delay_s = parse_number<double>(f[8], "mean_e2e_delay_s");
  m.routing_overhead_ratio = parse_number<double>(f[9], "routing_overhead_ratio");
  m.route_acq_latency_s = parse_number<double>(f[10], "route_acq_latency_s");
  m.dropped_count = parse_number<std::int64_t>(f[11], "dropped_count");
  m.block_height = parse_number<std::int64_t>(f[12], "block_height");
  m.mean_block_gen_latency_s = parse_number<double>(f[13], "mean_block_gen_latency_s");
  m.detection_rate_pct = parse_number<double>(f[14], "detection_rate_pct");
  m.security_level_pct = parse_number<double>(f[15], "security_level_pct");
  return row;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  if (values.empty()) {
    return r;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  r.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - r.mean) * (v - r.mean);
    }
    r.stdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

AggregateRow aggregate(const std::string& label, const std::vector<MetricsReport>& runs) {
  auto col = [&](auto get) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& m : runs) {
      v.push_back(static_cast<double>(get(m)));
    }
    return mean_std(v);
  };
  AggregateRow a;
  a.label = label;
  a.runs = runs.size();
  a.pdr_pct = col([](const MetricsReport& m) { return m.pdr_pct; });
  a.throughput_pkt_per_s = col([](const MetricsReport& m) { return m.throughput_pkt_per_s; });
  a.dropped_count = col([](const MetricsReport& m) { return m.dropped_count; });
  a.mean_e2e_delay_s = col([](const MetricsReport& m) { return m.mean_e2e_delay_s; });
  a.routing_overhead_ratio = col([](const MetricsReport& m) { return m.routing_overhead_ratio; });
  a.detection_rate_pct = col([](const MetricsReport& m) { return m.detection_rate_pct; });
  a.security_level_pct = col([](const MetricsReport& m) { return m.security_level_pct; });
  return a;
}

std::string render_aggregate_table(const std::vector<AggregateRow>& rows) {
  auto cell = [](const MeanStd& ms, int decimals) {
    return format_trimmed(ms.mean, decimals) + " ± " + format_trimmed(ms.stdev, decimals);
  };
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"protocol", "runs", "pdr_pct", "throughput_pkt_s", "dropped", "delay_s",
                   "overhead", "detection_pct", "security_level_pct"});
  for (const auto& r : rows) {
    cells.push_back({r.label, std::to_string(r.runs), cell(r.pdr_pct, 2),
                     cell(r.throughput_pkt_per_s, 2), cell(r.dropped_count, 1),
                     cell(r.mean_e2e_delay_s, 4), cell(r.routing_overhead_ratio, 3),
                     cell(r.detection_rate_pct, 1), cell(r.security_level_pct, 1)});
  }
  // Widths count code points so the two-byte "±" does not skew alignment.
  auto display_width = [](const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) {
      w += (c & 0xC0) != 0x80;
    }
    return w;
  };
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      width[i] = std::max(width[i], display_width(line[i]));
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
        os << std::string(width[i] - display_width(line[i]), ' ');
      }
    }
    os << '\n';
  }
  return os.str();
}

} // namespace manet

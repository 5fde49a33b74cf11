#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "manet/attack_kind.hpp"
#include "manet/types.hpp"

namespace manet {

struct Area {
  double width_m = 1000.0;
  double height_m = 1000.0;
  bool operator==(const Area&) const = default;
};

struct SpeedRange {
  double min = 1.0;
  double max = 10.0;
  bool operator==(const SpeedRange&) const = default;
};

struct FuzzyBounds {
  double low_max_s = 0.02;
  double high_min_s = 0.10;
  bool operator==(const FuzzyBounds&) const = default;
};

struct TrafficFlow {
  NodeId src = 0;
  NodeId dst = 1;
  double rate_pkt_per_s = 1.0;
  std::uint32_t payload_bits = 4096;
  double start_s = 0.0;
  /// Generation stops at this time; unset means the end of the run.
  std::optional<double> stop_s;
  bool operator==(const TrafficFlow&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Full experiment description. The JSON scenario file uses these field names
/// verbatim; see README.md for the format and the defaults.
struct ScenarioConfig {
  int node_count = 2;
  Area area;
  double radio_range_m = 250.0;
  SpeedRange speed_range;
  double pause_time_s = 2.0;
  double sim_duration_s = 100.0;
  std::vector<TrafficFlow> traffic_flows;
  Protocol protocol = Protocol::AODV;
  std::vector<AttackerSpec> attackers;
  std::uint64_t seed = 1;
  double link_rate_bps = 2e6;
  double per_hop_processing_s = 0.001;
  FuzzyBounds fuzzy_bounds;
  double blacklist_timer_s = 60.0;
  int block_size_txs = 8;
  double difficulty = 1.0;

  // Substrate tunables. All optional in the scenario file.
  std::vector<Point> initial_positions;  // empty: uniform random placement
  double hello_interval_s = 1.0;         // 0 disables HELLO beacons
  std::uint32_t control_packet_bits = 512;
  int queue_capacity = 50;
  double route_lifetime_s = 10.0;
  double reverse_route_lifetime_s = 3.0;
  int rreq_retries = 2;
  double rreq_timeout_s = 1.0;
  double ack_timeout_s = 1.0;
  double block_seal_timeout_s = 5.0;

  bool operator==(const ScenarioConfig&) const = default;
};

class ScenarioError : public std::runtime_error {
public:
  enum class Kind { Parse, Validation };

  ScenarioError(Kind kind, std::string field, const std::string& what);

  Kind kind() const { return kind_; }
  /// Offending field, dotted for nested keys (e.g. "traffic_flows[1].dst").
  const std::string& field() const { return field_; }

private:
  Kind kind_;
  std::string field_;
};

/// Parses and validates a JSON scenario document.
ScenarioConfig load_scenario(std::string_view text);
ScenarioConfig load_scenario_file(const std::string& path);

/// Throws ScenarioError(Validation) naming the first violated invariant.
void validate(const ScenarioConfig& config);

/// Serialises a config as a scenario document accepted by load_scenario.
std::string dump_scenario(const ScenarioConfig& config);

} // namespace manet

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "manet/config.hpp"
#include "manet/rng.hpp"

namespace manet {

/// Random-waypoint state of one node. speed is zero while paused.
struct Position {
  double x = 0.0;
  double y = 0.0;
  Point waypoint;
  double speed = 0.0;
  double pause_until = 0.0;

  bool operator==(const Position&) const = default;
};

struct MobilityParams {
  Area area;
  SpeedRange speed;
  double pause_time_s = 0.0;

  static MobilityParams from(const ScenarioConfig& c) {
    return {c.area, c.speed_range, c.pause_time_s};
  }
  bool is_static() const { return speed.max <= 0.0; }
};

inline constexpr double kMobilityTickS = 0.1;

Point draw_waypoint(const Area& area, Rng& rng);

/// Initial state: `start` if given, otherwise a uniform point; then the first
/// leg's waypoint and speed are drawn.
Position initial_position(const MobilityParams& params, Rng& rng,
                          std::optional<Point> start = std::nullopt);

/// Advances one node over [now, now + dt]. On reaching its waypoint the node
/// pauses for pause_time_s, then draws a new waypoint and speed.
Position step_mobility(Position state, double now, double dt, const MobilityParams& params,
                       Rng& rng);

/// Unit-disk neighbours of `node`: every other node within `radio_range_m`,
/// ascending by id. Throws std::out_of_range for an unknown node.
std::vector<NodeId> neighbors(NodeId node, std::span<const Position> positions,
                              double radio_range_m);

bool in_range(const Position& a, const Position& b, double radio_range_m);

/// Symmetric adjacency matrix for the unit-disk graph.
class Adjacency {
public:
  Adjacency() = default;
  Adjacency(std::span<const Position> positions, double radio_range_m);

  bool linked(NodeId a, NodeId b) const {
    return a != b && bits_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)];
  }
  const std::vector<NodeId>& neighbors_of(NodeId a) const { return lists_[a]; }
  std::size_t size() const { return n_; }

private:
  std::size_t n_ = 0;
  std::vector<char> bits_;
  std::vector<std::vector<NodeId>> lists_;
};

} // namespace manet

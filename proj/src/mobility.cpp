#include "manet/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace manet {

namespace {

void start_leg(Position& s, const MobilityParams& params, Rng& rng) {
  s.waypoint = draw_waypoint(params.area, rng);
  s.speed = rng.uniform(params.speed.min, params.speed.max);
}

void clamp_to_area(Position& s, const Area& area) {
  s.x = std::clamp(s.x, 0.0, area.width_m);
  s.y = std::clamp(s.y, 0.0, area.height_m);
}

} // namespace

Point draw_waypoint(const Area& area, Rng& rng) {
  const double x = rng.uniform(0.0, area.width_m);
  const double y = rng.uniform(0.0, area.height_m);
  return {x, y};
}

Position initial_position(const MobilityParams& params, Rng& rng, std::optional<Point> start) {
  Position s;
  const Point p = start ? *start : draw_waypoint(params.area, rng);
  s.x = p.x;
  s.y = p.y;
  s.pause_until = 0.0;
  if (params.is_static()) {
    s.waypoint = p;
    s.speed = 0.0;
    s.pause_until = std::numeric_limits<double>::infinity();
    return s;
  }
  start_leg(s, params, rng);
  return s;
}

Position step_mobility(Position s, double now, double dt, const MobilityParams& params, Rng& rng) {
  if (params.is_static()) {
    return s;
  }
  double t = now;
  const double end = now + dt;
  // Each iteration either finishes the step or consumes a pause/leg boundary.
  while (t < end) {
    if (s.speed <= 0.0) {
      if (s.pause_until >= end) {
        return s;
      }
      t = std::max(t, s.pause_until);
      start_leg(s, params, rng);
      if (s.speed <= 0.0) {
        // Zero-speed draw: the node stays put for the remainder of the run.
        s.pause_until = std::numeric_limits<double>::infinity();
        return s;
      }
      continue;
    }
    const double dx = s.waypoint.x - s.x;
    const double dy = s.waypoint.y - s.y;
    const double dist = std::sqrt(dx * dx + dy * dy);
    const double arrive = dist / s.speed;
    if (t + arrive > end) {
      const double frac = s.speed * (end - t) / dist;
      s.x += dx * frac;
      s.y += dy * frac;
      clamp_to_area(s, params.area);
      return s;
    }
    t += arrive;
    s.x = s.waypoint.x;
    s.y = s.waypoint.y;
    s.speed = 0.0;
    s.pause_until = t + params.pause_time_s;
  }
  return s;
}

bool in_range(const Position& a, const Position& b, double radio_range_m) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy <= radio_range_m * radio_range_m;
}

std::vector<NodeId> neighbors(NodeId node, std::span<const Position> positions,
                              double radio_range_m) {
  if (node < 0 || static_cast<std::size_t>(node) >= positions.size()) {
    throw std::out_of_range("neighbors: unknown node id " + std::to_string(node));
  }
  std::vector<NodeId> out;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    if (static_cast<NodeId>(j) != node &&
        in_range(positions[static_cast<std::size_t>(node)], positions[j], radio_range_m)) {
      out.push_back(static_cast<NodeId>(j));
    }
  }
  return out;
}

Adjacency::Adjacency(std::span<const Position> positions, double radio_range_m)
    : n_(positions.size()), bits_(n_ * n_, 0), lists_(n_) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (in_range(positions[i], positions[j], radio_range_m)) {
        bits_[i * n_ + j] = 1;
        bits_[j * n_ + i] = 1;
      }
    }
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (bits_[i * n_ + j]) {
        lists_[i].push_back(static_cast<NodeId>(j));
      }
    }
  }
}

} // namespace manet

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "manet/config.hpp"
#include "manet/ledger.hpp"
#include "manet/mobility.hpp"
#include "manet/trace.hpp"

namespace manet {

enum class EventKind : std::uint8_t {
  PACKET_ARRIVAL,
  MOBILITY_TICK,
  TIMER_EXPIRY,
  TRAFFIC_GEN,
  BLOCK_SEAL,
};

struct SimResult {
  SimTrace trace;
  LedgerChain chain;
  /// Configured attackers.
  std::set<NodeId> truth;
  /// Fabricated identity -> owning attacker.
  std::map<NodeId, NodeId> aliases;
  /// Positions at the end of the run.
  std::vector<Position> final_positions;
  std::uint64_t events_processed = 0;
};

struct SimHooks {
  /// Called for every dequeued event with its time and insertion sequence.
  std::function<void(double time, std::uint64_t sequence, EventKind kind)> on_event;
};

/// Runs the scenario to sim_duration_s. A pure function of the config.
SimResult run_simulation(const ScenarioConfig& config, const SimHooks& hooks = {});

} // namespace manet

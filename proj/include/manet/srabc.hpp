#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "manet/config.hpp"
#include "manet/ledger.hpp"
#include "manet/packet.hpp"
#include "manet/routing.hpp"
#include "manet/trace.hpp"

namespace manet {

enum class DelayLabel : std::uint8_t { LOW, MEDIUM, HIGH };

std::string_view to_string(DelayLabel l);

struct FuzzyAssessment {
  DelayLabel label = DelayLabel::LOW;
  double mu_low = 1.0;
  double mu_med = 0.0;
  double mu_high = 0.0;
  double crisp_s = 0.0;
};

/// Trapezoidal LOW, triangular MEDIUM and ramp HIGH over the crisp delay.
/// Throws std::invalid_argument for a negative delay or low_max >= high_min.
FuzzyAssessment fuzzify_delay(double crisp_s, const FuzzyBounds& bounds);

struct DelaySample {
  NodeId neighbor = kNoNode;
  double sample_s = 0.0;
  double at = 0.0;
};

/// Per-neighbour delay estimates and forwarding outcomes seen by one node.
class DelayMonitor {
public:
  static constexpr double kAlpha = 0.3;
  static constexpr std::size_t kWindow = 20;
  static constexpr std::size_t kMinOutcomes = 5;
  static constexpr int kHighStreak = 3;

  /// EWMA update; the first sample initialises the estimate. Throws
  /// std::invalid_argument for a negative sample.
  double record_delay_sample(NodeId neighbor, double sample_s, double now);
  std::optional<double> estimate(NodeId neighbor) const;

  /// Assessment of the current estimate. Unmeasured neighbours get a neutral
  /// prior of half the LOW plateau.
  FuzzyAssessment assess(NodeId neighbor, const FuzzyBounds& bounds) const;

  /// Updates the consecutive-HIGH streak and returns it.
  int note_assessment(NodeId neighbor, DelayLabel label);

  /// Records whether a watched hand-off was lost; returns the drop ratio over
  /// the last kWindow outcomes.
  double record_outcome(NodeId neighbor, bool dropped);
  /// Drop ratio above one half with at least kMinOutcomes observations.
  bool drop_anomaly(NodeId neighbor) const;

  const std::deque<DelaySample>& samples(NodeId neighbor) const;

  /// Clears all statistics for a neighbour, e.g. after it was evicted.
  void forget(NodeId neighbor);

private:
  struct Stats {
    bool has_estimate = false;
    double estimate = 0.0;
    std::deque<DelaySample> window;
    int high_streak = 0;
    std::deque<bool> outcomes;
  };
  std::map<NodeId, Stats> stats_;
};

struct BlacklistEntry {
  NodeId node_id = kNoNode;
  EvictionReason reason = EvictionReason::HIGH_DELAY;
  double since = 0.0;
  double expires = 0.0;
};

class Blacklist {
public:
  /// Active entry for `node` at `now`, or nullptr.
  const BlacklistEntry* find(NodeId node, double now) const;
  bool contains(NodeId node, double now) const { return find(node, now) != nullptr; }

  /// Throws PreconditionError if `node` is already blacklisted at e.since.
  void add(const BlacklistEntry& e);
  /// Adds unless already active; returns whether it was added.
  bool merge(const BlacklistEntry& e);

  const std::map<NodeId, BlacklistEntry>& entries() const { return entries_; }

private:
  std::map<NodeId, BlacklistEntry> entries_;
};

struct Candidate {
  NodeId node = kNoNode;
  FuzzyAssessment assessment;
};

/// Minimal (label, crisp_s, node_id) among candidates not blacklisted at `now`.
std::optional<NodeId> select_next_hop(std::span<const Candidate> candidates,
                                      const Blacklist& blacklist, double now);

struct EvictionResult {
  BlacklistEntry entry;
  LedgerTransaction tx;
  /// RERRs for destinations that lost their route through the target.
  std::vector<Packet> rerrs;
};

struct EvictionContext {
  NodeId self = kNoNode;
  double now = 0.0;
  double blacklist_timer_s = 60.0;
  LedgerChain* chain = nullptr;
  SimTrace* trace = nullptr;
  AodvAgent* agent = nullptr;            // optional: routes via target get invalidated
  RoutingContext* routing = nullptr;     // required when agent is set
};

/// Blacklists `target`, submits an EVICT transaction and records
/// NODE_EVICTED. Throws PreconditionError if the target is already
/// blacklisted.
EvictionResult evict_node(Blacklist& blacklist, NodeId target, EvictionReason reason,
                          const EvictionContext& ctx);

/// Tag the sender attaches: keyed hash of the packet's canonical bytes
/// under the sender's provisioned secret. Returns false when the sender has
/// no secret.
bool sign_packet(Packet& packet, const LedgerChain& chain);

/// Receipt check: sender registered, tag present and correct.
bool verify_packet(const Packet& packet, const LedgerChain& chain);

/// Relay-side check before forwarding: previous hop registered, not
/// blacklisted, tag valid. On success a FORWARD_EVENT with the previous
/// hop's delay is submitted; on failure AUTH_FAIL is recorded.
bool authorize_forward(NodeId self, const Blacklist& blacklist, const Packet& packet,
                       LedgerChain& chain, SimTrace* trace, double now);

} // namespace manet

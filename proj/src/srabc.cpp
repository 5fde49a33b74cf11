#include "manet/srabc.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <tuple>

#include "manet/digest.hpp"

namespace manet {

std::string_view to_string(DelayLabel l) {
  switch (l) {
  case DelayLabel::LOW: return "LOW";
  case DelayLabel::MEDIUM: return "MEDIUM";
  case DelayLabel::HIGH: return "HIGH";
  }
  return "?";
}

FuzzyAssessment fuzzify_delay(double crisp_s, const FuzzyBounds& bounds) {
  const double lo = bounds.low_max_s;
  const double hi = bounds.high_min_s;
  if (!(lo < hi) || lo < 0.0) {
    throw std::invalid_argument("fuzzify_delay: bounds must satisfy 0 <= low_max_s < high_min_s");
  }
  if (!(crisp_s >= 0.0)) {
    throw std::invalid_argument("fuzzify_delay: crisp delay must be nonnegative");
  }
  const double mid = 0.5 * (lo + hi);
  FuzzyAssessment a;
  a.crisp_s = crisp_s;
  a.mu_low = crisp_s <= lo ? 1.0 : crisp_s >= mid ? 0.0 : (mid - crisp_s) / (mid - lo);
  a.mu_high = crisp_s <= mid ? 0.0 : crisp_s >= hi ? 1.0 : (crisp_s - mid) / (hi - mid);
  a.mu_med = 1.0 - a.mu_low - a.mu_high;
  if (a.mu_low >= a.mu_med && a.mu_low >= a.mu_high) {
    a.label = DelayLabel::LOW;
  } else if (a.mu_med >= a.mu_high) {
    a.label = DelayLabel::MEDIUM;
  } else {
    a.label = DelayLabel::HIGH;
  }
  return a;
}

double DelayMonitor::record_delay_sample(NodeId neighbor, double sample_s, double now) {
  if (!(sample_s >= 0.0)) {
    throw std::invalid_argument("record_delay_sample: negative delay sample");
  }
  Stats& s = stats_[neighbor];
  s.estimate = s.has_estimate ? kAlpha * sample_s + (1.0 - kAlpha) * s.estimate : sample_s;
  s.has_estimate = true;
  s.window.push_back({neighbor, sample_s, now});
  if (s.window.size() > kWindow) {
    s.window.pop_front();
  }
  return s.estimate;
}

std::optional<double> DelayMonitor::estimate(NodeId neighbor) const {
  auto it = stats_.find(neighbor);
  if (it == stats_.end() || !it->second.has_estimate) {
    return std::nullopt;
  }
  return it->second.estimate;
}

FuzzyAssessment DelayMonitor::assess(NodeId neighbor, const FuzzyBounds& bounds) const {
  const double crisp = estimate(neighbor).value_or(0.5 * bounds.low_max_s);
  return fuzzify_delay(crisp, bounds);
}

int DelayMonitor::note_assessment(NodeId neighbor, DelayLabel label) {
  Stats& s = stats_[neighbor];
  s.high_streak = label == DelayLabel::HIGH ? s.high_streak + 1 : 0;
  return s.high_streak;
}

double DelayMonitor::record_outcome(NodeId neighbor, bool dropped) {
  Stats& s = stats_[neighbor];
  s.outcomes.push_back(dropped);
  if (s.outcomes.size() > kWindow) {
    s.outcomes.pop_front();
  }
  const auto drops = std::count(s.outcomes.begin(), s.outcomes.end(), true);
  return static_cast<double>(drops) / static_cast<double>(s.outcomes.size());
}

bool DelayMonitor::drop_anomaly(NodeId neighbor) const {
  auto it = stats_.find(neighbor);
  if (it == stats_.end() || it->second.outcomes.size() < kMinOutcomes) {
    return false;
  }
  const auto& o = it->second.outcomes;
  const auto drops = std::count(o.begin(), o.end(), true);
  return 2 * static_cast<std::size_t>(drops) > o.size();
}

const std::deque<DelaySample>& DelayMonitor::samples(NodeId neighbor) const {
  static const std::deque<DelaySample> kEmpty;
  auto it = stats_.find(neighbor);
  return it == stats_.end() ? kEmpty : it->second.window;
}

void DelayMonitor::forget(NodeId neighbor) { stats_.erase(neighbor); }

const BlacklistEntry* Blacklist::find(NodeId node, double now) const {
  auto it = entries_.find(node);
  if (it == entries_.end() || now < it->second.since || now >= it->second.expires) {
    return nullptr;
  }
  return &it->second;
}

void Blacklist::add(const BlacklistEntry& e) {
  if (contains(e.node_id, e.since)) {
    throw PreconditionError("node " + std::to_string(e.node_id) + " is already blacklisted");
  }
  entries_[e.node_id] = e;
}

bool Blacklist::merge(const BlacklistEntry& e) {
  if (contains(e.node_id, e.since)) {
    return false;
  }
  entries_[e.node_id] = e;
  return true;
}

std::optional<NodeId> select_next_hop(std::span<const Candidate> candidates,
                                      const Blacklist& blacklist, double now) {
  const Candidate* best = nullptr;
  auto key = [](const Candidate& c) {
    return std::make_tuple(static_cast<int>(c.assessment.label), c.assessment.crisp_s, c.node);
  };
  for (const auto& c : candidates) {
    if (blacklist.contains(c.node, now)) {
      continue;
    }
    if (best == nullptr || key(c) < key(*best)) {
      best = &c;
    }
  }
  if (best == nullptr) {
    return std::nullopt;
  }
  return best->node;
}

EvictionResult evict_node(Blacklist& blacklist, NodeId target, EvictionReason reason,
                          const EvictionContext& ctx) {
  if (ctx.chain == nullptr) {
    throw PreconditionError("evict_node needs the ledger");
  }
  EvictionResult out;
  out.entry = {target, reason, ctx.now, ctx.now + ctx.blacklist_timer_s};
  blacklist.add(out.entry);
  out.tx = ctx.chain->submit(make_evict(ctx.self, target, reason, ctx.now));
  if (ctx.trace != nullptr) {
    TraceRecord r;
    r.time = ctx.now;
    r.node = ctx.self;
    r.kind = RecordKind::NODE_EVICTED;
    r.peer = target;
    r.evict_reason = reason;
    ctx.trace->add(r);
  }
  if (ctx.agent != nullptr) {
    if (ctx.routing == nullptr) {
      throw PreconditionError("evict_node: routing context missing");
    }
    out.rerrs = ctx.agent->handle_link_break(target, *ctx.routing);
  }
  return out;
}

bool sign_packet(Packet& packet, const LedgerChain& chain) {
  const Digest* key = chain.secret_of(packet.sender);
  if (key == nullptr) {
    packet.auth_tag.reset();
    return false;
  }
  packet.auth_tag = keyed_tag(*key, canonical_bytes(packet));
  return true;
}

bool verify_packet(const Packet& packet, const LedgerChain& chain) {
  if (!packet.auth_tag) {
    return false;
  }
  return chain.authenticate_message(packet.sender, canonical_bytes(packet), *packet.auth_tag);
}

bool authorize_forward(NodeId self, const Blacklist& blacklist, const Packet& packet,
                       LedgerChain& chain, SimTrace* trace, double now) {
  const bool ok = !blacklist.contains(packet.sender, now) && verify_packet(packet, chain);
  if (!ok) {
    if (trace != nullptr) {
      TraceRecord r;
      r.time = now;
      r.node = self;
      r.kind = RecordKind::AUTH_FAIL;
      r.packet_id = packet.packet_id;
      r.packet_kind = packet.kind;
      r.peer = packet.sender;
      r.forged = packet.meta.forged;
      trace->add(r);
    }
    return false;
  }
  chain.submit(make_forward_event(self, packet.packet_id, now - packet.meta.hop_rx_time, now));
  return true;
}

} // namespace manet

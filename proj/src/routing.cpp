#include "manet/routing.hpp"

#include <algorithm>

namespace manet {

RoutingParams RoutingParams::for_protocol(Protocol p) {
  RoutingParams r;
  r.protocol = p;
  if (p == Protocol::SRABC) {
    r.max_replies = 3;
    r.keep_alternates = true;
  }
  return r;
}

AodvAgent::AodvAgent(NodeId self, RoutingParams params) : self_(self), params_(params) {}

PacketId AodvAgent::alloc_id(RoutingContext& ctx) {
  if (ctx.next_packet_id == nullptr) {
    throw PreconditionError("routing context has no packet id allocator");
  }
  return (*ctx.next_packet_id)++;
}

Packet AodvAgent::control_packet(PacketKind kind, RoutingContext& ctx) {
  Packet p;
  p.packet_id = alloc_id(ctx);
  p.kind = kind;
  p.src = self_;
  p.origin_time = ctx.now;
  p.sender = self_;
  p.next_hop = kBroadcast;
  return p;
}

const RoutingTableEntry* AodvAgent::lookup(NodeId dest, double now) const {
  auto it = table_.find(dest);
  if (it == table_.end() || !it->second.usable(now)) {
    return nullptr;
  }
  return &it->second;
}

const RoutingTableEntry* AodvAgent::entry(NodeId dest) const {
  auto it = table_.find(dest);
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<NodeId> AodvAgent::next_hops(NodeId dest, double now) const {
  std::vector<NodeId> out;
  const RoutingTableEntry* e = lookup(dest, now);
  if (e == nullptr) {
    return out;
  }
  out.push_back(e->next_hop);
  for (const auto& a : e->alternates) {
    if (a.lifetime_expiry > now && a.next_hop != e->next_hop) {
      out.push_back(a.next_hop);
    }
  }
  return out;
}

void AodvAgent::refresh(NodeId dest, double now) {
  auto it = table_.find(dest);
  if (it != table_.end() && it->second.usable(now)) {
    it->second.lifetime_expiry =
        std::max(it->second.lifetime_expiry, now + params_.route_lifetime_s);
  }
}

void AodvAgent::install_route(const RoutingTableEntry& e) { table_[e.dest] = e; }

void AodvAgent::invalidate(RoutingTableEntry& e) {
  e.valid = false;
  e.alternates.clear();
  if (e.dest_seq_known) {
    ++e.dest_seq_no;
  }
}

bool AodvAgent::drop_next_hop(NodeId dest, NodeId via, double now) {
  auto it = table_.find(dest);
  if (it == table_.end() || !it->second.valid) {
    return false;
  }
  RoutingTableEntry& e = it->second;
  std::erase_if(e.alternates, [&](const AlternateHop& a) {
    return a.next_hop == via || a.lifetime_expiry <= now;
  });
  if (e.next_hop != via) {
    return false;
  }
  if (!e.alternates.empty()) {
    auto best = std::min_element(e.alternates.begin(), e.alternates.end(),
                                 [](const AlternateHop& a, const AlternateHop& b) {
                                   return a.hop_count < b.hop_count;
                                 });
    e.next_hop = best->next_hop;
    e.hop_count = best->hop_count;
    e.lifetime_expiry = best->lifetime_expiry;
    e.alternates.erase(best);
    return false;
  }
  invalidate(e);
  return true;
}

std::vector<NodeId> AodvAgent::routes_via(NodeId via, double now) const {
  std::vector<NodeId> out;
  for (const auto& [dest, e] : table_) {
    if (e.usable(now) && e.next_hop == via) {
      out.push_back(dest);
    }
  }
  return out;
}

bool AodvAgent::update_route(NodeId dest, NodeId next_hop, int hops, std::uint32_t seq,
                             bool seq_known, double expiry, double now, bool& alternate_added) {
  alternate_added = false;
  auto [it, inserted] = table_.try_emplace(dest);
  RoutingTableEntry& e = it->second;
  if (inserted) {
    e.dest = dest;
  }
  const bool usable = e.usable(now);

  bool better = false;
  bool newer_seq = false;
  if (!usable) {
    better = !seq_known || !e.dest_seq_known || seq >= e.dest_seq_no || !e.valid;
    newer_seq = true;
  } else if (seq_known && e.dest_seq_known) {
    newer_seq = seq > e.dest_seq_no;
    better = newer_seq || (seq == e.dest_seq_no && hops < e.hop_count);
  } else if (seq_known) {
    better = true;
    newer_seq = true;
  } else {
    better = hops < e.hop_count;
  }

  if (better) {
    if (params_.keep_alternates && usable && !newer_seq && e.next_hop != next_hop &&
        e.hop_count <= hops + 1) {
      e.alternates.push_back({e.next_hop, e.hop_count, e.lifetime_expiry});
    }
    if (newer_seq) {
      e.alternates.clear();
    }
    const bool same_hop = usable && e.next_hop == next_hop;
    e.next_hop = next_hop;
    e.hop_count = hops;
    if (seq_known) {
      e.dest_seq_no = seq;
      e.dest_seq_known = true;
    }
    e.valid = true;
    e.lifetime_expiry = same_hop ? std::max(e.lifetime_expiry, expiry) : expiry;
    std::erase_if(e.alternates, [&](const AlternateHop& a) {
      return a.next_hop == next_hop || a.hop_count > hops + 1;
    });
    return true;
  }

  if (e.next_hop == next_hop) {
    e.lifetime_expiry = std::max(e.lifetime_expiry, expiry);
    return false;
  }
  if (params_.keep_alternates && seq_known && e.dest_seq_known && seq == e.dest_seq_no &&
      hops <= e.hop_count + 1) {
    auto alt = std::find_if(e.alternates.begin(), e.alternates.end(),
                            [&](const AlternateHop& a) { return a.next_hop == next_hop; });
    if (alt == e.alternates.end()) {
      e.alternates.push_back({next_hop, hops, expiry});
      alternate_added = true;
    } else {
      alt->hop_count = std::min(alt->hop_count, hops);
      alt->lifetime_expiry = std::max(alt->lifetime_expiry, expiry);
    }
  }
  return false;
}

void AodvAgent::note_neighbor(NodeId neighbor, double now) {
  if (neighbor == self_) {
    return;
  }
  auto [it, inserted] = table_.try_emplace(neighbor);
  RoutingTableEntry& e = it->second;
  if (inserted) {
    e.dest = neighbor;
  }
  if (!e.usable(now) || e.next_hop != neighbor) {
    e.next_hop = neighbor;
    e.hop_count = 1;
    e.valid = true;
    e.alternates.clear();
    e.lifetime_expiry = now + params_.route_lifetime_s;
    return;
  }
  e.lifetime_expiry = std::max(e.lifetime_expiry, now + params_.route_lifetime_s);
}

Packet AodvAgent::originate_rreq(NodeId dest, RoutingContext& ctx) {
  if (has_route(dest, ctx.now)) {
    throw PreconditionError("originate_rreq: node " + std::to_string(self_) +
                            " already has a valid route to " + std::to_string(dest));
  }
  ++own_seq_;
  Packet p = control_packet(PacketKind::RREQ, ctx);
  p.dst = dest;
  p.rreq_id = next_rreq_id_++;
  p.orig_seq = own_seq_;
  if (const RoutingTableEntry* e = entry(dest); e != nullptr && e->dest_seq_known) {
    p.dest_seq = e->dest_seq_no;
    p.dest_seq_known = true;
  }
  if (params_.protocol == Protocol::QAODV) {
    if (ctx.rng == nullptr) {
      throw PreconditionError("QAODV request needs a random stream");
    }
    p.rand_gate = ctx.rng->uniform();
  }
  seen_rreqs_.insert({self_, p.rreq_id});
  if (ctx.trace != nullptr) {
    TraceRecord r;
    r.time = ctx.now;
    r.node = self_;
    r.kind = RecordKind::ROUTE_REQUESTED;
    r.packet_id = p.packet_id;
    r.packet_kind = PacketKind::RREQ;
    r.peer = dest;
    ctx.trace->add(r);
  }
  return p;
}

Packet AodvAgent::build_rrep(const Packet& rreq, NodeId from, RoutingContext& ctx) {
  Packet p = control_packet(PacketKind::RREP, ctx);
  p.dst = rreq.src;
  p.next_hop = from;
  p.dest_seq_known = true;
  if (rreq.dst == self_) {
    p.src = self_;
    p.hop_count = 0;
    p.dest_seq = own_seq_;
  } else {
    const RoutingTableEntry* e = lookup(rreq.dst, ctx.now);
    p.src = rreq.dst;
    p.hop_count = e->hop_count;
    p.dest_seq = e->dest_seq_no;
  }
  return p;
}

RreqOutcome AodvAgent::process_rreq(const Packet& rreq, NodeId from, RoutingContext& ctx) {
  if (rreq.kind != PacketKind::RREQ) {
    throw PreconditionError("process_rreq: packet kind is " + std::string(to_string(rreq.kind)));
  }
  RreqOutcome out;
  if (rreq.src == self_) {
    return out;
  }
  const auto key = std::make_pair(rreq.src, rreq.rreq_id);
  bool alt = false;
  if (seen_rreqs_.count(key) != 0) {
    if (rreq.dst == self_ && params_.max_replies > 1) {
      auto& answered = replied_[key];
      if (std::find(answered.begin(), answered.end(), from) == answered.end() &&
          static_cast<int>(answered.size()) < params_.max_replies) {
        answered.push_back(from);
        update_route(rreq.src, from, rreq.hop_count + 1, rreq.orig_seq, true,
                     ctx.now + params_.reverse_route_lifetime_s, ctx.now, alt);
        out.decision = ForwardDecision::REPLY;
        out.packet = build_rrep(rreq, from, ctx);
      }
    }
    return out;
  }
  seen_rreqs_.insert(key);
  update_route(rreq.src, from, rreq.hop_count + 1, rreq.orig_seq, true,
               ctx.now + params_.reverse_route_lifetime_s, ctx.now, alt);

  if (rreq.dst == self_) {
    own_seq_ = std::max(own_seq_, rreq.dest_seq) + 1;
    if (params_.max_replies > 1) {
      replied_[key].push_back(from);
    }
    out.decision = ForwardDecision::REPLY;
    out.packet = build_rrep(rreq, from, ctx);
    return out;
  }

  const RoutingTableEntry* known = lookup(rreq.dst, ctx.now);
  if (known != nullptr && known->dest_seq_known && known->next_hop != from &&
      (!rreq.dest_seq_known || known->dest_seq_no >= rreq.dest_seq)) {
    out.decision = ForwardDecision::REPLY;
    out.packet = build_rrep(rreq, from, ctx);
    return out;
  }

  if (params_.protocol == Protocol::QAODV) {
    const double vacancy =
        1.0 - static_cast<double>(ctx.queue_len) / static_cast<double>(params_.queue_capacity);
    if (!(rreq.rand_gate < vacancy)) {
      out.decision = ForwardDecision::DROP_GATED;
      return out;
    }
  }

  Packet fwd = rreq;
  fwd.hop_count = rreq.hop_count + 1;
  fwd.sender = self_;
  fwd.next_hop = kBroadcast;
  fwd.ttl = rreq.ttl - 1;
  fwd.auth_tag.reset();
  fwd.meta = FrameMeta{};
  if (const RoutingTableEntry* e = entry(rreq.dst);
      e != nullptr && e->dest_seq_known && (!fwd.dest_seq_known || e->dest_seq_no > fwd.dest_seq)) {
    fwd.dest_seq = e->dest_seq_no;
    fwd.dest_seq_known = true;
  }
  out.decision = ForwardDecision::REBROADCAST;
  out.packet = std::move(fwd);
  return out;
}

RouteUpdate AodvAgent::process_rrep(const Packet& rrep, NodeId from, RoutingContext& ctx) {
  if (rrep.kind != PacketKind::RREP) {
    throw PreconditionError("process_rrep: packet kind is " + std::string(to_string(rrep.kind)));
  }
  RouteUpdate out;
  bool alt = false;
  out.installed = update_route(rrep.src, from, rrep.hop_count + 1, rrep.dest_seq,
                               rrep.dest_seq_known, ctx.now + params_.route_lifetime_s, ctx.now,
                               alt);
  if (rrep.dst == self_) {
    if (out.installed) {
      out.action = RrepAction::ESTABLISHED;
      if (ctx.trace != nullptr) {
        TraceRecord r;
        r.time = ctx.now;
        r.node = self_;
        r.kind = RecordKind::ROUTE_ESTABLISHED;
        r.packet_id = rrep.packet_id;
        r.packet_kind = PacketKind::RREP;
        r.peer = rrep.src;
        r.hops = table_.at(rrep.src).hop_count;
        ctx.trace->add(r);
      }
    } else {
      out.action = RrepAction::ABSORBED;
    }
    out.installed = out.installed || alt;
    return out;
  }
  out.installed = out.installed || alt;

  const RoutingTableEntry* reverse = lookup(rrep.dst, ctx.now);
  if (reverse == nullptr) {
    out.action = RrepAction::DROPPED;
    if (ctx.trace != nullptr) {
      TraceRecord r;
      r.time = ctx.now;
      r.node = self_;
      r.kind = RecordKind::DROPPED;
      r.packet_id = rrep.packet_id;
      r.packet_kind = PacketKind::RREP;
      r.peer = rrep.dst;
      r.drop = DropReason::NO_REVERSE_ROUTE;
      ctx.trace->add(r);
    }
    return out;
  }
  Packet fwd = rrep;
  fwd.hop_count = rrep.hop_count + 1;
  fwd.sender = self_;
  fwd.next_hop = reverse->next_hop;
  fwd.ttl = rrep.ttl - 1;
  fwd.auth_tag.reset();
  fwd.meta = FrameMeta{};
  refresh(rrep.dst, ctx.now);
  out.action = RrepAction::FORWARDED;
  out.packet = std::move(fwd);
  return out;
}

Packet AodvAgent::make_rerr(NodeId dest, RoutingContext& ctx) {
  Packet p = control_packet(PacketKind::RERR, ctx);
  p.dst = kBroadcast;
  const RoutingTableEntry* e = entry(dest);
  p.unreachable.push_back({dest, e != nullptr ? e->dest_seq_no : 0u});
  return p;
}

Packet AodvAgent::make_hello(RoutingContext& ctx) {
  Packet p = control_packet(PacketKind::HELLO, ctx);
  p.dst = kBroadcast;
  p.orig_seq = own_seq_;
  p.ttl = 1;
  return p;
}

std::vector<Packet> AodvAgent::handle_link_break(NodeId lost, RoutingContext& ctx) {
  std::vector<NodeId> broken;
  for (auto& [dest, e] : table_) {
    if (!e.valid) {
      continue;
    }
    const bool was_usable = e.usable(ctx.now);
    if (drop_next_hop(dest, lost, ctx.now) && was_usable) {
      broken.push_back(dest);
    }
  }
  std::vector<Packet> out;
  out.reserve(broken.size());
  for (NodeId d : broken) {
    out.push_back(make_rerr(d, ctx));
  }
  return out;
}

std::vector<Packet> AodvAgent::process_rerr(const Packet& rerr, NodeId from, RoutingContext& ctx) {
  if (rerr.kind != PacketKind::RERR) {
    throw PreconditionError("process_rerr: packet kind is " + std::string(to_string(rerr.kind)));
  }
  std::vector<Packet> out;
  for (const auto& u : rerr.unreachable) {
    auto it = table_.find(u.dst);
    if (it == table_.end() || !it->second.valid) {
      continue;
    }
    const bool was_usable = it->second.usable(ctx.now);
    if (drop_next_hop(u.dst, from, ctx.now)) {
      RoutingTableEntry& e = it->second;
      if (u.seq > e.dest_seq_no) {
        e.dest_seq_no = u.seq;
        e.dest_seq_known = true;
      }
      if (was_usable) {
        out.push_back(make_rerr(u.dst, ctx));
      }
    }
  }
  return out;
}

} // namespace manet

#include "manet/adversary.hpp"

#include <stdexcept>

#include "manet/routing.hpp"

namespace manet {

namespace {

Digest random_digest(Rng& rng) {
  Digest d{};
  for (std::size_t i = 0; i < d.size(); i += 8) {
    std::uint64_t x = rng.next_u64();
    for (std::size_t b = 0; b < 8; ++b) {
      d[i + b] = static_cast<std::uint8_t>(x >> (8 * b));
    }
  }
  return d;
}

NodeId random_other(Rng& rng, int node_count, NodeId self) {
  if (node_count < 2) {
    return kNoNode;
  }
  auto pick = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(node_count - 1)));
  return pick >= self ? pick + 1 : pick;
}

NodeId random_neighbor(Rng& rng, std::span<const NodeId> neighbors) {
  if (neighbors.empty()) {
    return kNoNode;
  }
  return neighbors[rng.below(neighbors.size())];
}

Packet forged_frame(PacketKind kind, NodeId claimed, PacketId& next_id, double now) {
  Packet p;
  p.packet_id = next_id++;
  p.kind = kind;
  p.src = claimed;
  p.sender = claimed;
  p.origin_time = now;
  p.next_hop = kBroadcast;
  p.meta.forged = true;
  return p;
}

bool relays_data(const Packet& p, NodeId self) {
  return p.kind == PacketKind::DATA && p.dst != self;
}

} // namespace

ActionSet apply_attack(AttackerState& attacker, const Packet& packet, NodeId from, Rng& rng,
                       double now, PacketId& next_packet_id) {
  ActionSet out;
  const NodeId self = attacker.self;
  switch (attacker.kind.type) {
  case AttackType::BLACKHOLE:
    if (relays_data(packet, self)) {
      out.drop = true;
      out.reason = DropReason::BLACKHOLE;
    }
    break;
  case AttackType::GREYHOLE:
    if (relays_data(packet, self) && rng.bernoulli(attacker.kind.drop_prob)) {
      out.drop = true;
      out.reason = DropReason::GREYHOLE;
    }
    break;
  case AttackType::SINKHOLE:
    if (relays_data(packet, self)) {
      out.drop = true;
      out.reason = DropReason::SINKHOLE;
    } else if (packet.kind == PacketKind::RREQ && packet.src != self && packet.dst != self) {
      out.consume = true;
      if (attacker.answered.insert({packet.src, packet.rreq_id}).second) {
        Packet rrep;
        rrep.packet_id = next_packet_id++;
        rrep.kind = PacketKind::RREP;
        rrep.src = packet.dst;
        rrep.dst = packet.src;
        rrep.origin_time = now;
        rrep.hop_count = 1;
        rrep.dest_seq = kMaxAdvertisedSeq;
        rrep.dest_seq_known = true;
        rrep.sender = self;
        rrep.next_hop = from;
        out.emit.push_back(std::move(rrep));
      }
    }
    break;
  case AttackType::SPOOFED_ROUTING:
    if (is_control(packet.kind) && packet.sender != self) {
      attacker.observed.push_back(packet);
      if (attacker.observed.size() > kReplayMemory) {
        attacker.observed.pop_front();
      }
    }
    break;
  case AttackType::WORMHOLE:
  case AttackType::SYBIL:
  case AttackType::HELLO_FLOOD:
  case AttackType::DOS_FLOOD:
    break;
  default:
    throw std::invalid_argument("apply_attack: unknown attack kind");
  }
  return out;
}

std::vector<Packet> attack_emissions(AttackerState& attacker, Rng& rng, PacketId& next_packet_id,
                                     const EmissionContext& ctx) {
  std::vector<Packet> out;
  const NodeId self = attacker.self;
  switch (attacker.kind.type) {
  case AttackType::SYBIL:
    for (NodeId fake : attacker.identities) {
      Packet hello = forged_frame(PacketKind::HELLO, fake, next_packet_id, ctx.now);
      hello.dst = kBroadcast;
      hello.ttl = 1;
      out.push_back(std::move(hello));

      Packet rreq = forged_frame(PacketKind::RREQ, fake, next_packet_id, ctx.now);
      rreq.dst = random_other(rng, ctx.node_count, self);
      rreq.rreq_id = attacker.next_rreq_id++;
      rreq.orig_seq = rreq.rreq_id + 1;
      rreq.rand_gate = rng.uniform();
      out.push_back(std::move(rreq));

      const NodeId via = random_neighbor(rng, ctx.neighbors);
      if (via != kNoNode) {
        Packet data = forged_frame(PacketKind::DATA, fake, next_packet_id, ctx.now);
        data.dst = random_other(rng, ctx.node_count, self);
        data.payload_bits = ctx.payload_bits;
        data.next_hop = via;
        data.meta.injected = true;
        out.push_back(std::move(data));
      }
    }
    break;
  case AttackType::HELLO_FLOOD: {
    Packet hello;
    hello.packet_id = next_packet_id++;
    hello.kind = PacketKind::HELLO;
    hello.src = self;
    hello.sender = self;
    hello.dst = kBroadcast;
    hello.origin_time = ctx.now;
    hello.ttl = 1;
    hello.meta.flood_all = true;
    out.push_back(std::move(hello));
    break;
  }
  case AttackType::SPOOFED_ROUTING: {
    if (!attacker.observed.empty()) {
      Packet replay = std::move(attacker.observed.front());
      attacker.observed.pop_front();
      replay.sender = self;
      if (replay.next_hop != kBroadcast) {
        replay.next_hop = random_neighbor(rng, ctx.neighbors);
      }
      replay.meta = FrameMeta{};
      replay.meta.forged = true;
      if (replay.next_hop != kNoNode) {
        out.push_back(std::move(replay));
      }
    }
    const NodeId via = random_neighbor(rng, ctx.neighbors);
    if (via != kNoNode) {
      Packet rrep = forged_frame(PacketKind::RREP, random_other(rng, ctx.node_count, self),
                                 next_packet_id, ctx.now);
      rrep.sender = self;
      rrep.dst = random_other(rng, ctx.node_count, self);
      rrep.hop_count = 1;
      rrep.dest_seq = static_cast<std::uint32_t>(rng.below(kMaxAdvertisedSeq));
      rrep.dest_seq_known = true;
      rrep.next_hop = via;
      rrep.auth_tag = random_digest(rng);
      out.push_back(std::move(rrep));
    }
    break;
  }
  case AttackType::DOS_FLOOD: {
    Packet data = forged_frame(PacketKind::DATA, self, next_packet_id, ctx.now);
    data.dst = dos_victim(attacker.kind, self, ctx.node_count);
    data.payload_bits = ctx.payload_bits;
    data.next_hop = kNoNode;
    data.auth_tag = random_digest(rng);
    data.meta.injected = true;
    out.push_back(std::move(data));
    break;
  }
  default:
    break;
  }
  return out;
}

std::optional<double> emission_interval(const AttackKind& kind, double hello_interval_s) {
  const double beacon = hello_interval_s > 0.0 ? hello_interval_s : 1.0;
  switch (kind.type) {
  case AttackType::SYBIL: return beacon;
  case AttackType::HELLO_FLOOD: return beacon / kind.rate_multiplier;
  case AttackType::SPOOFED_ROUTING: return beacon;
  case AttackType::DOS_FLOOD: return 1.0 / kind.rate_pkt_per_s;
  default: return std::nullopt;
  }
}

std::optional<NodeId> wormhole_peer(const AttackKind& kind) {
  if (kind.type == AttackType::WORMHOLE && kind.peer != kNoNode) {
    return kind.peer;
  }
  return std::nullopt;
}

NodeId dos_victim(const AttackKind& kind, NodeId self, int node_count) {
  if (kind.victim != kNoNode) {
    return kind.victim;
  }
  return node_count > 0 ? (self + 1) % node_count : kNoNode;
}

std::set<NodeId> ground_truth(const ScenarioConfig& config) {
  std::set<NodeId> out;
  for (const auto& a : config.attackers) {
    out.insert(a.node);
  }
  return out;
}

std::map<NodeId, NodeId> sybil_identities(const ScenarioConfig& config) {
  std::map<NodeId, NodeId> out;
  NodeId next = config.node_count;
  for (const auto& a : config.attackers) {
    if (a.kind.type != AttackType::SYBIL) {
      continue;
    }
    for (int j = 0; j < a.kind.identity_count; ++j) {
      out[next++] = a.node;
    }
  }
  return out;
}

} // namespace manet

#include "manet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>

#include "manet/adversary.hpp"
#include "manet/routing.hpp"
#include "manet/srabc.hpp"

namespace manet {

namespace {

enum class TimerKind : std::uint8_t { TX_DONE, HELLO, RREQ_TIMEOUT, WATCHDOG, ATTACK_TICK };

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::TIMER_EXPIRY;
  TimerKind timer = TimerKind::TX_DONE;
  NodeId node = kNoNode;
  NodeId aux = kNoNode;
  std::uint64_t token = 0;
  std::int64_t index = 0;
  /// PACKET_ARRIVAL: the frame reached a node outside the sender's range.
  bool beyond_range = false;
  Packet packet;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) {
      return a.time > b.time;
    }
    return a.seq > b.seq;
  }
};

struct Discovery {
  int attempt = 0;
  std::uint64_t token = 0;
};

struct Watch {
  NodeId watcher = kNoNode;
  std::uint64_t token = 0;
};

struct Node {
  NodeId id = kNoNode;
  Position pos;
  Rng mobility_rng;
  Rng protocol_rng;
  Rng attack_rng;
  AodvAgent agent;
  std::deque<Packet> txq;
  bool busy = false;
  std::map<NodeId, std::deque<Packet>> route_wait;
  std::map<NodeId, Discovery> discoveries;
  std::map<NodeId, double> last_heard;
  DelayMonitor monitor;
  Blacklist blacklist;
  std::optional<AttackerState> attacker;

  Node(NodeId i, const ScenarioConfig& c, const RoutingParams& rp)
      : id(i), mobility_rng(Rng::for_stream(c.seed, i, StreamPurpose::Mobility)),
        protocol_rng(Rng::for_stream(c.seed, i, StreamPurpose::Protocol)),
        attack_rng(Rng::for_stream(c.seed, i, StreamPurpose::Attack)), agent(i, rp) {}
};

class Simulator {
public:
  Simulator(const ScenarioConfig& cfg, const SimHooks& hooks)
      : cfg_(cfg), hooks_(hooks), mob_(MobilityParams::from(cfg)),
        srabc_(cfg.protocol == Protocol::SRABC),
        result_{SimTrace{}, LedgerChain(0.0, cfg.block_size_txs), {}, {}, {}, 0} {}

  SimResult run();

private:
  // --- scheduling ---------------------------------------------------------
  void push(Event e) {
    e.seq = next_seq_++;
    heap_.push_back(std::move(e));
    std::push_heap(heap_.begin(), heap_.end(), Later{});
  }
  void timer(double t, TimerKind k, NodeId node, NodeId aux = kNoNode, std::uint64_t token = 0,
             std::int64_t index = 0) {
    Event e;
    e.time = t;
    e.kind = EventKind::TIMER_EXPIRY;
    e.timer = k;
    e.node = node;
    e.aux = aux;
    e.token = token;
    e.index = index;
    push(std::move(e));
  }

  // --- helpers ------------------------------------------------------------
  Node& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  bool physical(NodeId id) const { return id >= 0 && id < cfg_.node_count; }
  NodeId owner_of(NodeId id) const {
    if (physical(id)) {
      return id;
    }
    auto it = result_.aliases.find(id);
    return it == result_.aliases.end() ? kNoNode : it->second;
  }
  std::optional<NodeId> tunnel_peer(NodeId id) {
    const Node& n = node(id);
    return n.attacker ? wormhole_peer(n.attacker->kind) : std::nullopt;
  }
  bool tunnel(NodeId a, NodeId b) {
    auto pa = tunnel_peer(a);
    return pa && *pa == b;
  }
  bool radio_link(NodeId a, NodeId b) {
    return a != b && in_range(node(a).pos, node(b).pos, cfg_.radio_range_m);
  }
  bool reachable(NodeId a, NodeId b) { return radio_link(a, b) || tunnel(a, b) || tunnel(b, a); }
  std::vector<NodeId> physical_neighbors(NodeId id) {
    std::vector<NodeId> out;
    for (NodeId j = 0; j < cfg_.node_count; ++j) {
      if (reachable(id, j)) {
        out.push_back(j);
      }
    }
    return out;
  }
  bool malicious(NodeId id) const { return result_.truth.count(id) != 0; }

  RoutingContext rctx(Node& n) {
    RoutingContext c;
    c.now = now_;
    c.trace = &result_.trace;
    c.next_packet_id = &next_packet_id_;
    c.rng = &n.protocol_rng;
    c.queue_len = static_cast<int>(n.txq.size());
    return c;
  }

  void trace(TraceRecord r) {
    r.time = now_;
    result_.trace.add(r);
  }
  void trace_drop(NodeId at, const Packet& p, DropReason reason, NodeId peer) {
    TraceRecord r;
    r.node = at;
    r.kind = RecordKind::DROPPED;
    r.packet_id = p.packet_id;
    r.packet_kind = p.kind;
    r.peer = peer;
    r.drop = reason;
    trace(r);
  }
  std::uint32_t frame_bits(const Packet& p) const {
    return p.kind == PacketKind::DATA ? p.payload_bits : cfg_.control_packet_bits;
  }

  // --- protocol machinery -------------------------------------------------
  void start();
  void handle(Event& e);
  void on_mobility();
  void on_traffic(std::int64_t flow, std::int64_t k);
  void on_arrival(Event& e);
  void on_tx_done(NodeId id);
  void on_hello(NodeId id);
  void on_rreq_timeout(NodeId id, NodeId dest, std::uint64_t token);
  void on_watchdog(NodeId watcher, NodeId watched, PacketId pid, std::uint64_t token);
  void on_attack_tick(NodeId id, double interval);

  void enqueue_ctrl(Node& n, Packet p);
  void enqueue_all(Node& n, std::vector<Packet> ps) {
    for (auto& p : ps) {
      enqueue_ctrl(n, std::move(p));
    }
  }
  bool enqueue_data(Node& n, Packet p, NodeId next, DataRole traced_role);
  void try_start_tx(Node& n);
  void source_send(Node& n, Packet p);
  std::optional<NodeId> choose_next_hop(Node& n, NodeId dest);
  void start_discovery(Node& n, NodeId dest);
  void flush_route_wait(Node& n);
  void relay_data(Node& r, Packet p);
  void dispatch_control(Node& r, const Packet& p);

  void nack(PacketId pid, NodeId watched);
  void assess_neighbor(Node& w, NodeId x, double sample, bool dropped);
  void evict(Node& w, NodeId target, EvictionReason reason);
  void after_submit();
  void seal();

  const ScenarioConfig& cfg_;
  const SimHooks& hooks_;
  MobilityParams mob_;
  bool srabc_;
  SimResult result_;

  std::vector<Node> nodes_;
  std::vector<Event> heap_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
  PacketId next_packet_id_ = 1;
  std::uint64_t next_token_ = 1;
  std::map<std::pair<PacketId, NodeId>, Watch> watches_;
  std::uint64_t seal_batch_ = 0;
  bool seal_armed_ = false;
};

void Simulator::start() {
  result_.truth = ground_truth(cfg_);
  result_.aliases = sybil_identities(cfg_);

  RoutingParams rp = RoutingParams::for_protocol(cfg_.protocol);
  rp.route_lifetime_s = cfg_.route_lifetime_s;
  rp.reverse_route_lifetime_s = cfg_.reverse_route_lifetime_s;
  rp.queue_capacity = cfg_.queue_capacity;

  nodes_.reserve(static_cast<std::size_t>(cfg_.node_count));
  for (NodeId i = 0; i < cfg_.node_count; ++i) {
    nodes_.emplace_back(i, cfg_, rp);
    Node& n = nodes_.back();
    Rng placement = Rng::for_stream(cfg_.seed, i, StreamPurpose::Placement);
    std::optional<Point> at;
    if (!cfg_.initial_positions.empty()) {
      at = cfg_.initial_positions[static_cast<std::size_t>(i)];
    } else {
      at = draw_waypoint(cfg_.area, placement);
    }
    n.pos = initial_position(mob_, n.mobility_rng, at);
  }
  for (const auto& a : cfg_.attackers) {
    AttackerState st;
    st.self = a.node;
    st.kind = a.kind;
    for (const auto& [fake, owner] : result_.aliases) {
      if (owner == a.node) {
        st.identities.push_back(fake);
      }
    }
    node(a.node).attacker = std::move(st);
  }

  if (srabc_) {
    for (NodeId i = 0; i < cfg_.node_count; ++i) {
      Rng key_rng = Rng::for_stream(cfg_.seed, i, StreamPurpose::Key);
      Digest secret{};
      for (std::size_t b = 0; b < secret.size(); b += 8) {
        const std::uint64_t x = key_rng.next_u64();
        for (std::size_t k = 0; k < 8; ++k) {
          secret[b + k] = static_cast<std::uint8_t>(x >> (8 * k));
        }
      }
      result_.chain.register_node(i, secret, 0.0);
      after_submit();
    }
  }

  if (!mob_.is_static()) {
    Event e;
    e.time = kMobilityTickS;
    e.kind = EventKind::MOBILITY_TICK;
    e.index = 1;
    push(std::move(e));
  }
  for (std::size_t f = 0; f < cfg_.traffic_flows.size(); ++f) {
    Event e;
    e.time = cfg_.traffic_flows[f].start_s;
    e.kind = EventKind::TRAFFIC_GEN;
    e.node = cfg_.traffic_flows[f].src;
    e.aux = static_cast<NodeId>(f);
    e.index = 0;
    push(std::move(e));
  }
  for (Node& n : nodes_) {
    if (cfg_.hello_interval_s > 0.0) {
      timer(n.protocol_rng.uniform() * cfg_.hello_interval_s, TimerKind::HELLO, n.id);
    }
    if (n.attacker) {
      if (auto iv = emission_interval(n.attacker->kind, cfg_.hello_interval_s)) {
        timer(n.attack_rng.uniform() * *iv, TimerKind::ATTACK_TICK, n.id);
      }
    }
  }
}

SimResult Simulator::run() {
  start();
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event e = std::move(heap_.back());
    heap_.pop_back();
    if (e.time > cfg_.sim_duration_s) {
      break;
    }
    now_ = e.time;
    ++result_.events_processed;
    if (hooks_.on_event) {
      hooks_.on_event(e.time, e.seq, e.kind);
    }
    handle(e);
  }
  now_ = cfg_.sim_duration_s;
  if (!result_.chain.pending().empty()) {
    seal();
  }
  for (const Node& n : nodes_) {
    result_.final_positions.push_back(n.pos);
  }
  return std::move(result_);
}

void Simulator::handle(Event& e) {
  switch (e.kind) {
  case EventKind::MOBILITY_TICK:
    on_mobility();
    {
      Event next;
      next.index = e.index + 1;
      next.time = static_cast<double>(next.index) * kMobilityTickS;
      next.kind = EventKind::MOBILITY_TICK;
      push(std::move(next));
    }
    break;
  case EventKind::TRAFFIC_GEN:
    on_traffic(e.aux, e.index);
    break;
  case EventKind::PACKET_ARRIVAL:
    on_arrival(e);
    break;
  case EventKind::BLOCK_SEAL:
    if (e.token == seal_batch_ && seal_armed_ && !result_.chain.pending().empty()) {
      seal();
    }
    break;
  case EventKind::TIMER_EXPIRY:
    switch (e.timer) {
    case TimerKind::TX_DONE: on_tx_done(e.node); break;
    case TimerKind::HELLO: on_hello(e.node); break;
    case TimerKind::RREQ_TIMEOUT: on_rreq_timeout(e.node, e.aux, e.token); break;
    case TimerKind::WATCHDOG:
      on_watchdog(e.node, e.aux, static_cast<PacketId>(e.index), e.token);
      break;
    case TimerKind::ATTACK_TICK:
      on_attack_tick(e.node, *emission_interval(node(e.node).attacker->kind,
                                                cfg_.hello_interval_s));
      break;
    }
    break;
  }
}

void Simulator::on_mobility() {
  // Positions are sampled at the end of each tick interval.
  const double from = now_ - kMobilityTickS;
  for (Node& n : nodes_) {
    n.pos = step_mobility(n.pos, from, kMobilityTickS, mob_, n.mobility_rng);
  }
}

void Simulator::on_traffic(std::int64_t flow, std::int64_t k) {
  const TrafficFlow& f = cfg_.traffic_flows[static_cast<std::size_t>(flow)];
  Node& src = node(f.src);
  Packet p;
  p.packet_id = next_packet_id_++;
  p.kind = PacketKind::DATA;
  p.src = f.src;
  p.dst = f.dst;
  p.origin_time = now_;
  p.payload_bits = f.payload_bits;
  p.sender = f.src;
  p.meta.hop_rx_time = now_;
  TraceRecord r;
  r.node = f.src;
  r.kind = RecordKind::SENT_DATA;
  r.packet_id = p.packet_id;
  r.packet_kind = PacketKind::DATA;
  r.peer = f.dst;
  r.bits = p.payload_bits;
  r.role = DataRole::ORIGIN;
  trace(r);
  source_send(src, std::move(p));

  const double next = f.start_s + static_cast<double>(k + 1) / f.rate_pkt_per_s;
  const double stop = f.stop_s.value_or(cfg_.sim_duration_s);
  if (next < stop && next <= cfg_.sim_duration_s) {
    Event e;
    e.time = next;
    e.kind = EventKind::TRAFFIC_GEN;
    e.node = f.src;
    e.aux = static_cast<NodeId>(flow);
    e.index = k + 1;
    push(std::move(e));
  }
}

std::optional<NodeId> Simulator::choose_next_hop(Node& n, NodeId dest) {
  std::vector<NodeId> hops = n.agent.next_hops(dest, now_);
  if (hops.empty()) {
    return std::nullopt;
  }
  if (!srabc_) {
    return hops.front();
  }
  std::vector<Candidate> candidates;
  for (NodeId h : hops) {
    if (n.blacklist.contains(h, now_)) {
      n.agent.drop_next_hop(dest, h, now_);
      continue;
    }
    const NodeId phys = owner_of(h);
    if (phys == kNoNode || !reachable(n.id, phys)) {
      RoutingContext c = rctx(n);
      enqueue_all(n, n.agent.handle_link_break(h, c));
      continue;
    }
    candidates.push_back({h, n.monitor.assess(h, cfg_.fuzzy_bounds)});
  }
  return select_next_hop(candidates, n.blacklist, now_);
}

void Simulator::source_send(Node& n, Packet p) {
  if (auto next = choose_next_hop(n, p.dst)) {
    enqueue_data(n, std::move(p), *next, DataRole::NONE);
    return;
  }
  auto& buf = n.route_wait[p.dst];
  if (static_cast<int>(buf.size()) >= cfg_.queue_capacity) {
    trace_drop(n.id, p, DropReason::BUFFER_FULL, p.dst);
    return;
  }
  const NodeId dest = p.dst;
  buf.push_back(std::move(p));
  start_discovery(n, dest);
}

void Simulator::start_discovery(Node& n, NodeId dest) {
  if (n.discoveries.count(dest) != 0 || n.agent.has_route(dest, now_)) {
    return;
  }
  RoutingContext c = rctx(n);
  Packet rreq = n.agent.originate_rreq(dest, c);
  Discovery d;
  d.token = next_token_++;
  n.discoveries[dest] = d;
  enqueue_ctrl(n, std::move(rreq));
  timer(now_ + cfg_.rreq_timeout_s, TimerKind::RREQ_TIMEOUT, n.id, dest, d.token);
}

void Simulator::on_rreq_timeout(NodeId id, NodeId dest, std::uint64_t token) {
  Node& n = node(id);
  auto it = n.discoveries.find(dest);
  if (it == n.discoveries.end() || it->second.token != token) {
    return;
  }
  if (n.agent.has_route(dest, now_)) {
    n.discoveries.erase(it);
    flush_route_wait(n);
    return;
  }
  Discovery& d = it->second;
  if (d.attempt < cfg_.rreq_retries) {
    ++d.attempt;
    d.token = next_token_++;
    RoutingContext c = rctx(n);
    enqueue_ctrl(n, n.agent.originate_rreq(dest, c));
    const double wait = cfg_.rreq_timeout_s * std::ldexp(1.0, d.attempt);
    timer(now_ + wait, TimerKind::RREQ_TIMEOUT, n.id, dest, d.token);
    return;
  }
  n.discoveries.erase(it);
  auto buf = n.route_wait.find(dest);
  if (buf != n.route_wait.end()) {
    for (const Packet& p : buf->second) {
      trace_drop(n.id, p, DropReason::DISCOVERY_FAILED, dest);
    }
    n.route_wait.erase(buf);
  }
}

void Simulator::flush_route_wait(Node& n) {
  for (auto it = n.route_wait.begin(); it != n.route_wait.end();) {
    const NodeId dest = it->first;
    if (it->second.empty()) {
      it = n.route_wait.erase(it);
      continue;
    }
    if (!n.agent.has_route(dest, now_)) {
      ++it;
      continue;
    }
    std::deque<Packet> pending = std::move(it->second);
    it = n.route_wait.erase(it);
    n.discoveries.erase(dest);
    for (Packet& p : pending) {
      source_send(n, std::move(p));
    }
    // source_send may have re-buffered into the map; restart the scan.
    it = n.route_wait.upper_bound(dest);
  }
}

void Simulator::enqueue_ctrl(Node& n, Packet p) {
  if (static_cast<int>(n.txq.size()) >= cfg_.queue_capacity) {
    trace_drop(n.id, p, DropReason::QUEUE_FULL, p.next_hop);
    return;
  }
  if (p.kind == PacketKind::DATA) {
    const NodeId next = p.next_hop;
    enqueue_data(n, std::move(p), next, DataRole::INJECTED);
    return;
  }
  TraceRecord r;
  r.node = n.id;
  r.kind = RecordKind::SENT_CTRL;
  r.packet_id = p.packet_id;
  r.packet_kind = p.kind;
  r.peer = p.next_hop;
  r.hops = p.hop_count;
  r.bits = frame_bits(p);
  r.forged = p.meta.forged;
  trace(r);
  n.txq.push_back(std::move(p));
  try_start_tx(n);
}

bool Simulator::enqueue_data(Node& n, Packet p, NodeId next, DataRole traced_role) {
  if (static_cast<int>(n.txq.size()) >= cfg_.queue_capacity) {
    trace_drop(n.id, p, DropReason::QUEUE_FULL, next);
    nack(p.packet_id, n.id);
    return false;
  }
  p.next_hop = next;
  if (traced_role != DataRole::NONE) {
    TraceRecord r;
    r.node = n.id;
    r.kind = RecordKind::SENT_DATA;
    r.packet_id = p.packet_id;
    r.packet_kind = PacketKind::DATA;
    r.peer = next;
    r.hops = p.hop_count;
    r.bits = p.payload_bits;
    r.role = traced_role;
    r.forged = p.meta.forged;
    trace(r);
  }
  n.agent.refresh(p.dst, now_);
  n.txq.push_back(std::move(p));
  try_start_tx(n);
  return true;
}

void Simulator::try_start_tx(Node& n) {
  if (n.busy || n.txq.empty()) {
    return;
  }
  Packet& p = n.txq.front();
  if (physical(p.sender) && p.sender != n.id) {
    p.sender = n.id;
  }
  p.meta.phys_tx = n.id;
  if (srabc_ && !p.meta.forged) {
    sign_packet(p, result_.chain);
  }
  n.busy = true;
  const double duration = static_cast<double>(frame_bits(p)) / cfg_.link_rate_bps;
  timer(now_ + duration, TimerKind::TX_DONE, n.id);
}

void Simulator::on_tx_done(NodeId id) {
  Node& n = node(id);
  Packet p = std::move(n.txq.front());
  n.txq.pop_front();
  n.busy = false;
  const double arrival = now_ + cfg_.per_hop_processing_s;

  auto schedule = [&](NodeId to, bool tunneled, bool beyond) {
    Event e;
    e.time = arrival;
    e.kind = EventKind::PACKET_ARRIVAL;
    e.node = to;
    e.beyond_range = beyond;
    e.packet = p;
    e.packet.meta.tunneled = tunneled;
    push(std::move(e));
  };

  if (p.next_hop == kBroadcast) {
    for (NodeId j = 0; j < cfg_.node_count; ++j) {
      if (j == id) {
        continue;
      }
      const bool radio = radio_link(id, j);
      const bool tun = !radio && (tunnel(id, j) || tunnel(j, id));
      if (radio || tun) {
        schedule(j, tun, false);
      } else if (p.meta.flood_all) {
        schedule(j, false, true);
      }
    }
  } else {
    const NodeId target = owner_of(p.next_hop);
    const bool radio = target != kNoNode && radio_link(id, target);
    const bool tun = target != kNoNode && !radio && (tunnel(id, target) || tunnel(target, id));
    if (radio || tun) {
      schedule(target, tun, false);
      if (srabc_ && p.kind == PacketKind::DATA && p.dst != p.next_hop && !malicious(id) &&
          physical(p.next_hop)) {
        Watch w;
        w.watcher = id;
        w.token = next_token_++;
        watches_[{p.packet_id, p.next_hop}] = w;
        timer(now_ + cfg_.ack_timeout_s, TimerKind::WATCHDOG, id, p.next_hop, w.token,
              static_cast<std::int64_t>(p.packet_id));
      }
    } else {
      trace_drop(id, p, DropReason::LINK_FAILURE, p.next_hop);
      if (p.kind == PacketKind::DATA) {
        nack(p.packet_id, id);
      }
      n.last_heard.erase(p.next_hop);
      RoutingContext c = rctx(n);
      enqueue_all(n, n.agent.handle_link_break(p.next_hop, c));
    }
  }
  try_start_tx(n);
}

void Simulator::on_arrival(Event& e) {
  Node& r = node(e.node);
  Packet& p = e.packet;
  const NodeId s = p.sender;
  if (p.next_hop != kBroadcast && p.next_hop != r.id) {
    return;  // addressed to a fabricated identity this node owns
  }

  if (srabc_) {
    if (e.beyond_range) {
      return;
    }
    if (r.blacklist.contains(s, now_)) {
      trace_drop(r.id, p, DropReason::BLACKLISTED, s);
      return;
    }
    if (!verify_packet(p, result_.chain)) {
      TraceRecord a;
      a.node = r.id;
      a.kind = RecordKind::AUTH_FAIL;
      a.packet_id = p.packet_id;
      a.packet_kind = p.kind;
      a.peer = s;
      a.forged = p.meta.forged;
      trace(a);
      if (!malicious(r.id)) {
        evict(r, s, EvictionReason::AUTH_FAIL);
      }
      return;
    }
  }

  r.last_heard[s] = now_;
  r.agent.note_neighbor(s, now_);

  if (srabc_ && p.kind == PacketKind::DATA) {
    auto w = watches_.find({p.packet_id, s});
    if (w != watches_.end()) {
      const NodeId watcher = w->second.watcher;
      watches_.erase(w);
      assess_neighbor(node(watcher), s, now_ - p.meta.hop_rx_time, false);
    }
  }

  TraceRecord rec;
  rec.node = r.id;
  rec.packet_id = p.packet_id;
  rec.packet_kind = p.kind;
  rec.peer = s;
  rec.hops = p.hop_count;
  rec.bits = frame_bits(p);
  rec.forged = p.meta.forged;
  if (p.kind == PacketKind::DATA) {
    rec.kind = RecordKind::RECEIVED_DATA;
    rec.role = p.dst == r.id ? DataRole::FINAL : DataRole::RELAY;
  } else {
    rec.kind = RecordKind::RECEIVED_CTRL;
  }
  trace(rec);

  if (r.attacker) {
    ActionSet act = apply_attack(*r.attacker, p, s, r.attack_rng, now_, next_packet_id_);
    for (Packet& out : act.emit) {
      enqueue_ctrl(r, std::move(out));
    }
    if (act.drop) {
      trace_drop(r.id, p, act.reason, s);
      return;
    }
    if (act.consume) {
      return;
    }
  }

  if (p.kind == PacketKind::DATA) {
    if (p.dst != r.id) {
      relay_data(r, std::move(p));
    }
    return;
  }
  dispatch_control(r, p);
}

void Simulator::dispatch_control(Node& r, const Packet& p) {
  const NodeId s = p.sender;
  RoutingContext c = rctx(r);
  switch (p.kind) {
  case PacketKind::RREQ: {
    RreqOutcome out = r.agent.process_rreq(p, s, c);
    if (out.packet) {
      enqueue_ctrl(r, std::move(*out.packet));
    }
    break;
  }
  case PacketKind::RREP: {
    RouteUpdate up = r.agent.process_rrep(p, s, c);
    if (up.packet) {
      enqueue_ctrl(r, std::move(*up.packet));
    }
    break;
  }
  case PacketKind::RERR:
    enqueue_all(r, r.agent.process_rerr(p, s, c));
    break;
  case PacketKind::HELLO:
  case PacketKind::DATA:
  case PacketKind::LEDGER_TX:
    break;
  }
  flush_route_wait(r);
}

void Simulator::relay_data(Node& r, Packet p) {
  const NodeId s = p.sender;
  if (p.ttl <= 1) {
    trace_drop(r.id, p, DropReason::TTL_EXPIRED, s);
    nack(p.packet_id, r.id);
    return;
  }
  const auto next = choose_next_hop(r, p.dst);
  if (!next) {
    trace_drop(r.id, p, DropReason::NO_ROUTE, p.dst);
    nack(p.packet_id, r.id);
    RoutingContext c = rctx(r);
    enqueue_ctrl(r, r.agent.make_rerr(p.dst, c));
    return;
  }
  if (static_cast<int>(r.txq.size()) >= cfg_.queue_capacity) {
    trace_drop(r.id, p, DropReason::QUEUE_FULL, *next);
    nack(p.packet_id, r.id);
    return;
  }
  if (srabc_) {
    if (!authorize_forward(r.id, r.blacklist, p, result_.chain, &result_.trace, now_)) {
      trace_drop(r.id, p, DropReason::AUTH, s);
      evict(r, s, EvictionReason::AUTH_FAIL);
      return;
    }
    after_submit();
  }
  p.hop_count += 1;
  p.ttl -= 1;
  p.meta = FrameMeta{};
  p.meta.prev_holder = s;
  p.meta.hop_rx_time = now_;
  p.auth_tag.reset();
  enqueue_data(r, std::move(p), *next, DataRole::FORWARD);
}

void Simulator::on_hello(NodeId id) {
  Node& n = node(id);
  RoutingContext c = rctx(n);
  enqueue_ctrl(n, n.agent.make_hello(c));
  const double limit = 3.0 * cfg_.hello_interval_s;
  std::vector<NodeId> lost;
  for (const auto& [nb, t] : n.last_heard) {
    if (now_ - t > limit) {
      lost.push_back(nb);
    }
  }
  for (NodeId nb : lost) {
    n.last_heard.erase(nb);
    RoutingContext lc = rctx(n);
    enqueue_all(n, n.agent.handle_link_break(nb, lc));
  }
  timer(now_ + cfg_.hello_interval_s, TimerKind::HELLO, id);
}

void Simulator::on_attack_tick(NodeId id, double interval) {
  Node& n = node(id);
  const std::vector<NodeId> nbrs = physical_neighbors(id);
  EmissionContext ctx;
  ctx.now = now_;
  ctx.node_count = cfg_.node_count;
  ctx.neighbors = nbrs;
  if (!cfg_.traffic_flows.empty()) {
    ctx.payload_bits = cfg_.traffic_flows.front().payload_bits;
  }
  std::vector<Packet> out = attack_emissions(*n.attacker, n.attack_rng, next_packet_id_, ctx);
  for (Packet& p : out) {
    if (p.kind == PacketKind::DATA && p.next_hop == kNoNode) {
      TraceRecord r;
      r.node = id;
      r.kind = RecordKind::SENT_DATA;
      r.packet_id = p.packet_id;
      r.packet_kind = PacketKind::DATA;
      r.peer = p.dst;
      r.bits = p.payload_bits;
      r.role = DataRole::INJECTED;
      r.forged = p.meta.forged;
      trace(r);
      p.meta.hop_rx_time = now_;
      source_send(n, std::move(p));
    } else {
      enqueue_ctrl(n, std::move(p));
    }
  }
  timer(now_ + interval, TimerKind::ATTACK_TICK, id);
}

void Simulator::nack(PacketId pid, NodeId watched) {
  watches_.erase({pid, watched});
}

void Simulator::on_watchdog(NodeId watcher, NodeId watched, PacketId pid, std::uint64_t token) {
  auto it = watches_.find({pid, watched});
  if (it == watches_.end() || it->second.token != token) {
    return;
  }
  watches_.erase(it);
  assess_neighbor(node(watcher), watched, cfg_.ack_timeout_s, true);
}

void Simulator::assess_neighbor(Node& w, NodeId x, double sample, bool dropped) {
  if (w.blacklist.contains(x, now_)) {
    return;
  }
  w.monitor.record_delay_sample(x, sample, now_);
  const FuzzyAssessment a = w.monitor.assess(x, cfg_.fuzzy_bounds);
  const int streak = w.monitor.note_assessment(x, a.label);
  w.monitor.record_outcome(x, dropped);
  if (streak >= DelayMonitor::kHighStreak) {
    evict(w, x, EvictionReason::HIGH_DELAY);
  } else if (w.monitor.drop_anomaly(x)) {
    evict(w, x, EvictionReason::DROP_ANOMALY);
  }
}

void Simulator::evict(Node& w, NodeId target, EvictionReason reason) {
  if (w.blacklist.contains(target, now_) || target == w.id) {
    return;
  }
  RoutingContext c = rctx(w);
  EvictionContext ec;
  ec.self = w.id;
  ec.now = now_;
  ec.blacklist_timer_s = cfg_.blacklist_timer_s;
  ec.chain = &result_.chain;
  ec.trace = &result_.trace;
  ec.agent = &w.agent;
  ec.routing = &c;
  EvictionResult res = evict_node(w.blacklist, target, reason, ec);
  w.monitor.forget(target);
  w.last_heard.erase(target);
  enqueue_all(w, std::move(res.rerrs));
  after_submit();
}

void Simulator::after_submit() {
  LedgerChain& chain = result_.chain;
  if (chain.pending_full()) {
    seal();
    return;
  }
  if (!chain.pending().empty() && !seal_armed_) {
    seal_armed_ = true;
    Event e;
    e.time = *chain.first_pending_time() + cfg_.block_seal_timeout_s;
    e.kind = EventKind::BLOCK_SEAL;
    e.token = seal_batch_;
    push(std::move(e));
  }
}

void Simulator::seal() {
  const Block& b = result_.chain.append_block(now_);
  ++seal_batch_;
  seal_armed_ = false;
  TraceRecord r;
  r.node = kNoNode;
  r.kind = RecordKind::BLOCK_SEALED;
  r.packet_id = b.index;
  r.hops = static_cast<int>(b.transactions.size());
  trace(r);

  // Sealed evictions bind every node.
  std::vector<LedgerTransaction> evictions;
  for (const auto& tx : b.transactions) {
    if (tx.kind == TxKind::EVICT) {
      evictions.push_back(tx);
    }
  }
  for (const auto& tx : evictions) {
    const double since = tx.timestamp();
    const BlacklistEntry entry{tx.evicted, tx.reason, since, since + cfg_.blacklist_timer_s};
    if (now_ >= entry.expires) {
      continue;
    }
    for (Node& n : nodes_) {
      if (n.id == tx.evicted || malicious(n.id)) {
        continue;
      }
      if (n.blacklist.contains(tx.evicted, now_)) {
        continue;
      }
      n.blacklist.merge({tx.evicted, tx.reason, now_, entry.expires});
      n.monitor.forget(tx.evicted);
      RoutingContext c = rctx(n);
      enqueue_all(n, n.agent.handle_link_break(tx.evicted, c));
    }
  }
}

} // namespace

SimResult run_simulation(const ScenarioConfig& config, const SimHooks& hooks) {
  validate(config);
  Simulator sim(config, hooks);
  return sim.run();
}

} // namespace manet

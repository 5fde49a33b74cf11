#include <map>
#include <set>

#include "doctest.h"
#include "manet/routing.hpp"
#include "manet/shortest_path.hpp"
#include "manet/simulator.hpp"
#include "test_support.hpp"

using namespace manet;

namespace {

struct Env {
  SimTrace trace;
  PacketId next_id = 1;
  Rng rng{7};
  RoutingContext ctx(double now = 0.0, int queue_len = 0) {
    RoutingContext c;
    c.now = now;
    c.trace = &trace;
    c.next_packet_id = &next_id;
    c.rng = &rng;
    c.queue_len = queue_len;
    return c;
  }
};

Packet rreq_from(NodeId src, NodeId dst, std::uint32_t id, double gate = 0.0) {
  Packet p;
  p.packet_id = 1000 + id;
  p.kind = PacketKind::RREQ;
  p.src = src;
  p.dst = dst;
  p.rreq_id = id;
  p.orig_seq = 1;
  p.rand_gate = gate;
  p.sender = src;
  return p;
}

} // namespace

TEST_CASE("originate_rreq: counters start at zero and increase") {
  Env env;
  AodvAgent a(0, RoutingParams::for_protocol(Protocol::AODV));
  auto ctx = env.ctx();
  const Packet first = a.originate_rreq(5, ctx);
  CHECK(first.kind == PacketKind::RREQ);
  CHECK(first.rreq_id == 0);
  CHECK(first.hop_count == 0);
  CHECK(first.src == 0);
  CHECK(first.dst == 5);
  const Packet second = a.originate_rreq(6, ctx);
  CHECK(second.rreq_id == 1);
  REQUIRE(env.trace.size() == 2);
  CHECK(env.trace.records()[0].kind == RecordKind::ROUTE_REQUESTED);
  CHECK(env.trace.records()[0].peer == 5);
}

TEST_CASE("originate_rreq: QAODV gate is the stream's next uniform draw") {
  Env env;
  env.rng = Rng(123);
  Rng replay(123);
  AodvAgent a(0, RoutingParams::for_protocol(Protocol::QAODV));
  auto ctx = env.ctx();
  for (int i = 0; i < 5; ++i) {
    const Packet p = a.originate_rreq(10 + i, ctx);
    CHECK(p.rand_gate == replay.uniform());
  }
}

TEST_CASE("originate_rreq: refuses when a route exists") {
  Env env;
  AodvAgent a(0, RoutingParams::for_protocol(Protocol::AODV));
  a.note_neighbor(1, 0.0);
  auto ctx = env.ctx();
  CHECK_THROWS_AS(a.originate_rreq(1, ctx), PreconditionError);
}

TEST_CASE("process_rreq: destination replies, duplicates are dropped") {
  Env env;
  AodvAgent d(5, RoutingParams::for_protocol(Protocol::AODV));
  auto ctx = env.ctx(1.0);
  const Packet q = rreq_from(0, 5, 0);
  const RreqOutcome first = d.process_rreq(q, 0, ctx);
  CHECK(first.decision == ForwardDecision::REPLY);
  REQUIRE(first.packet.has_value());
  CHECK(first.packet->kind == PacketKind::RREP);
  CHECK(first.packet->next_hop == 0);
  CHECK(first.packet->dst == 0);
  CHECK(first.packet->src == 5);
  CHECK(first.packet->hop_count == 0);
  CHECK(d.process_rreq(q, 0, ctx).decision == ForwardDecision::DROP_DUPLICATE);
  // The reverse route to the requester was installed.
  REQUIRE(d.lookup(0, 1.0) != nullptr);
  CHECK(d.lookup(0, 1.0)->next_hop == 0);
}

TEST_CASE("process_rreq: intermediate rebroadcasts with one more hop") {
  Env env;
  AodvAgent m(2, RoutingParams::for_protocol(Protocol::AODV));
  auto ctx = env.ctx();
  const RreqOutcome out = m.process_rreq(rreq_from(0, 5, 0), 0, ctx);
  CHECK(out.decision == ForwardDecision::REBROADCAST);
  REQUIRE(out.packet.has_value());
  CHECK(out.packet->hop_count == 1);
  CHECK(out.packet->sender == 2);
  CHECK(out.packet->ttl == 63);
}

TEST_CASE("process_rreq: QAODV gate boundaries") {
  Env env;
  const RoutingParams params = RoutingParams::for_protocol(Protocol::QAODV);
  AodvAgent empty(2, params);
  AodvAgent full(3, params);
  for (std::uint32_t i = 0; i < 100; ++i) {
    const double gate = i / 100.0;
    auto c0 = env.ctx(0.0, 0);
    CHECK(empty.process_rreq(rreq_from(0, 9, i, gate), 0, c0).decision ==
          ForwardDecision::REBROADCAST);
    auto c1 = env.ctx(0.0, params.queue_capacity);
    CHECK(full.process_rreq(rreq_from(0, 9, i, gate), 0, c1).decision ==
          ForwardDecision::DROP_GATED);
  }
}

TEST_CASE("process_rreq: QAODV rebroadcasts iff gate below vacancy") {
  Env env;
  const RoutingParams params = RoutingParams::for_protocol(Protocol::QAODV);
  AodvAgent a(4, params);
  Rng rng(2024);
  std::uint32_t id = 0;
  for (int q = 0; q <= params.queue_capacity; ++q) {
    const double vacancy = 1.0 - static_cast<double>(q) / params.queue_capacity;
    for (double gate : {vacancy, std::nextafter(vacancy, 0.0), rng.uniform(), rng.uniform()}) {
      auto ctx = env.ctx(0.0, q);
      const auto d = a.process_rreq(rreq_from(0, 9, id++, gate), 0, ctx).decision;
      CHECK((d == ForwardDecision::REBROADCAST) == (gate < vacancy));
    }
  }
}

TEST_CASE("process_rreq: QAODV at half vacancy rebroadcasts about half") {
  Env env;
  const RoutingParams params = RoutingParams::for_protocol(Protocol::QAODV);
  AodvAgent a(4, params);
  Rng gates(55);
  int rebroadcast = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    auto ctx = env.ctx(0.0, params.queue_capacity / 2);
    if (a.process_rreq(rreq_from(0, 9, i, gates.uniform()), 0, ctx).decision ==
        ForwardDecision::REBROADCAST) {
      ++rebroadcast;
    }
  }
  CHECK(std::abs(rebroadcast / static_cast<double>(n) - 0.5) <= 0.02);
}

TEST_CASE("process_rrep: relay forwards, requester installs a two-hop route") {
  Env env;
  const RoutingParams params = RoutingParams::for_protocol(Protocol::AODV);
  AodvAgent src(0, params), mid(1, params), dst(2, params);
  auto ctx = env.ctx(1.0);

  Packet q = src.originate_rreq(2, ctx);
  auto at_mid = mid.process_rreq(q, 0, ctx);
  REQUIRE(at_mid.decision == ForwardDecision::REBROADCAST);
  auto at_dst = dst.process_rreq(*at_mid.packet, 1, ctx);
  REQUIRE(at_dst.decision == ForwardDecision::REPLY);

  RouteUpdate relay = mid.process_rrep(*at_dst.packet, 2, ctx);
  CHECK(relay.action == RrepAction::FORWARDED);
  CHECK(relay.installed);
  REQUIRE(relay.packet.has_value());
  CHECK(relay.packet->hop_count == 1);
  CHECK(relay.packet->next_hop == 0);
  REQUIRE(mid.lookup(2, 1.0) != nullptr);
  CHECK(mid.lookup(2, 1.0)->next_hop == 2);

  RouteUpdate done = src.process_rrep(*relay.packet, 1, ctx);
  CHECK(done.action == RrepAction::ESTABLISHED);
  const RoutingTableEntry* e = src.lookup(2, 1.0);
  REQUIRE(e != nullptr);
  CHECK(e->hop_count == 2);
  CHECK(e->next_hop == 1);
  CHECK(env.trace.records().back().kind == RecordKind::ROUTE_ESTABLISHED);
  CHECK(env.trace.records().back().hops == 2);
}

TEST_CASE("process_rrep: expired reverse route drops the reply") {
  Env env;
  const RoutingParams params = RoutingParams::for_protocol(Protocol::AODV);
  AodvAgent src(0, params), mid(1, params), dst(2, params);
  auto ctx = env.ctx(1.0);
  Packet q = src.originate_rreq(2, ctx);
  auto at_mid = mid.process_rreq(q, 0, ctx);
  auto at_dst = dst.process_rreq(*at_mid.packet, 1, ctx);
  auto late = env.ctx(1.0 + params.reverse_route_lifetime_s + 0.5);
  RouteUpdate relay = mid.process_rrep(*at_dst.packet, 2, late);
  CHECK(relay.action == RrepAction::DROPPED);
  CHECK_FALSE(relay.packet.has_value());
  const TraceRecord& r = env.trace.records().back();
  CHECK(r.kind == RecordKind::DROPPED);
  CHECK(r.drop == DropReason::NO_REVERSE_ROUTE);
}

TEST_CASE("handle_link_break: unused neighbour yields nothing") {
  Env env;
  AodvAgent a(0, RoutingParams::for_protocol(Protocol::AODV));
  a.note_neighbor(1, 0.0);
  auto ctx = env.ctx();
  CHECK(a.handle_link_break(7, ctx).empty());
}

TEST_CASE("handle_link_break: three destinations through one neighbour") {
  Env env;
  AodvAgent a(0, RoutingParams::for_protocol(Protocol::AODV));
  for (NodeId d : {4, 5, 6}) {
    RoutingTableEntry e;
    e.dest = d;
    e.next_hop = 1;
    e.hop_count = 3;
    e.dest_seq_no = 10;
    e.dest_seq_known = true;
    e.lifetime_expiry = 100;
    e.valid = true;
    a.install_route(e);
  }
  a.note_neighbor(1, 0.0);
  auto ctx = env.ctx(1.0);
  const auto rerrs = a.handle_link_break(1, ctx);
  // Destinations 4, 5, 6 and the neighbour itself.
  CHECK(rerrs.size() == 4);
  for (NodeId d : {4, 5, 6}) {
    CHECK_FALSE(a.has_route(d, 1.0));
    CHECK(a.entry(d)->dest_seq_no == 11);
  }
  for (const auto& p : rerrs) {
    CHECK(p.kind == PacketKind::RERR);
    CHECK(p.unreachable.size() == 1);
  }
}

TEST_CASE("scripted three-node break: requester rediscovers after RERR") {
  Env env;
  const RoutingParams params = RoutingParams::for_protocol(Protocol::AODV);
  AodvAgent a(0, params), b(1, params), c(2, params);
  auto ctx = env.ctx(1.0);
  Packet q = a.originate_rreq(2, ctx);
  auto fwd = b.process_rreq(q, 0, ctx);
  auto rep = c.process_rreq(*fwd.packet, 1, ctx);
  auto relayed = b.process_rrep(*rep.packet, 2, ctx);
  a.process_rrep(*relayed.packet, 1, ctx);
  REQUIRE(a.has_route(2, 1.0));

  auto later = env.ctx(2.0);
  const auto rerrs = b.handle_link_break(2, later);
  REQUIRE(rerrs.size() == 1);
  env.trace.add({2.0, 1, RecordKind::SENT_CTRL, rerrs[0].packet_id, PacketKind::RERR});
  const auto propagated = a.process_rerr(rerrs[0], 1, later);
  CHECK(propagated.size() == 1);
  CHECK_FALSE(a.has_route(2, 2.0));

  auto next = env.ctx(2.5);
  const Packet again = a.originate_rreq(2, next);
  CHECK(again.rreq_id == 1);
  CHECK(again.dest_seq_known);
  const auto& recs = env.trace.records();
  REQUIRE(recs.size() >= 2);
  CHECK(recs[recs.size() - 2].kind == RecordKind::SENT_CTRL);
  CHECK(recs.back().kind == RecordKind::ROUTE_REQUESTED);
  CHECK(recs.back().time > recs[recs.size() - 2].time);
}

TEST_CASE("SRABC destination answers several previous hops and keeps alternates") {
  Env env;
  const RoutingParams params = RoutingParams::for_protocol(Protocol::SRABC);
  AodvAgent src(0, params), d(9, params);
  auto ctx = env.ctx(1.0);
  Packet q = src.originate_rreq(9, ctx);
  q.hop_count = 1;
  int replies = 0;
  for (NodeId via : {3, 4, 5, 6, 3}) {
    if (d.process_rreq(q, via, ctx).decision == ForwardDecision::REPLY) {
      ++replies;
    }
  }
  CHECK(replies == params.max_replies);

  Packet rrep;
  rrep.kind = PacketKind::RREP;
  rrep.src = 9;
  rrep.dst = 0;
  rrep.hop_count = 1;
  rrep.dest_seq = 4;
  rrep.dest_seq_known = true;
  src.process_rrep(rrep, 3, ctx);
  src.process_rrep(rrep, 4, ctx);
  CHECK(src.next_hops(9, 1.0) == std::vector<NodeId>{3, 4});
  CHECK_FALSE(src.drop_next_hop(9, 3, 1.0));
  CHECK(src.next_hops(9, 1.0) == std::vector<NodeId>{4});
  CHECK(src.drop_next_hop(9, 4, 1.0));
  CHECK_FALSE(src.has_route(9, 1.0));
}

TEST_CASE("shortest_path_oracle: worked example and edge cases") {
  AdjacencyLists adj(20);
  auto link = [&](NodeId a, NodeId b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  link(11, 19);
  link(19, 15);
  link(11, 12);
  link(12, 13);
  link(13, 15);
  CHECK(shortest_path_oracle(adj, 11, 15) == std::vector<NodeId>{11, 19, 15});
  CHECK(shortest_path_oracle(adj, 11, 11) == std::vector<NodeId>{11});
  CHECK_FALSE(shortest_path_oracle(adj, 11, 0).has_value());
  CHECK_THROWS_AS(shortest_path_oracle(adj, 11, 40), std::out_of_range);
}

TEST_CASE("shortest_path_oracle: minimal, loop free and consistent with BFS") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 5 + static_cast<int>(rng.below(25));
    std::vector<Point> pts(n);
    for (auto& p : pts) {
      p = {rng.uniform(0, 800), rng.uniform(0, 800)};
    }
    const auto adj = unit_disk(pts, 250);
    const NodeId s = static_cast<NodeId>(rng.below(n));
    const NodeId t = static_cast<NodeId>(rng.below(n));
    const auto hops = bfs_hops(adj, s);
    const auto path = shortest_path_oracle(adj, s, t);
    if (hops[t] < 0) {
      CHECK_FALSE(path.has_value());
      continue;
    }
    REQUIRE(path.has_value());
    CHECK(static_cast<int>(path->size()) == hops[t] + 1);
    CHECK(std::set<NodeId>(path->begin(), path->end()).size() == path->size());
    CHECK(path->front() == s);
    CHECK(path->back() == t);
    for (std::size_t i = 1; i < path->size(); ++i) {
      const auto& nb = adj[(*path)[i - 1]];
      CHECK(std::find(nb.begin(), nb.end(), (*path)[i]) != nb.end());
    }
  }
}

namespace {

ScenarioConfig static_flows(std::uint64_t seed, Protocol p) {
  Rng rng(seed);
  const auto pts = connected_placement(15, 700, 250, rng);
  ScenarioConfig c = static_config(pts, 700, 250, p);
  c.sim_duration_s = 20;
  c.seed = seed;
  c.hello_interval_s = 1.0;
  c.traffic_flows.push_back({0, 14, 2.0, 4096, 1.0, std::nullopt});
  c.traffic_flows.push_back({3, 9, 2.0, 4096, 2.0, std::nullopt});
  c.traffic_flows.push_back({7, 1, 2.0, 4096, 3.0, std::nullopt});
  return c;
}

} // namespace

TEST_CASE("static topologies: established routes are never shorter than the optimum") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (Protocol p : {Protocol::AODV, Protocol::QAODV, Protocol::SRABC}) {
      const ScenarioConfig c = static_flows(seed, p);
      const auto adj = unit_disk(c.initial_positions, c.radio_range_m);
      const SimResult r = run_simulation(c);
      for (const auto& t : r.trace.records()) {
        if (t.kind == RecordKind::ROUTE_ESTABLISHED) {
          CHECK(t.hops >= bfs_hops(adj, t.node)[t.peer]);
          ++checked;
        }
      }
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("static topologies: QAODV never sends more control traffic than AODV") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto ctrl = [](const SimResult& r) {
      return std::count_if(r.trace.records().begin(), r.trace.records().end(),
                           [](const TraceRecord& t) { return t.kind == RecordKind::SENT_CTRL; });
    };
    const auto aodv = ctrl(run_simulation(static_flows(seed, Protocol::AODV)));
    const auto qaodv = ctrl(run_simulation(static_flows(seed, Protocol::QAODV)));
    CHECK(qaodv <= aodv);
  }
}

TEST_CASE("every node rebroadcasts a given request at most once") {
  ScenarioConfig c = load_scenario_file(test_data("blackhole_20.json"));
  for (Protocol p : {Protocol::AODV, Protocol::QAODV, Protocol::SRABC}) {
    c.protocol = p;
    const SimResult r = run_simulation(c);
    std::map<std::pair<NodeId, PacketId>, int> sends;
    for (const auto& t : r.trace.records()) {
      if (t.kind == RecordKind::SENT_CTRL && t.packet_kind == PacketKind::RREQ) {
        ++sends[{t.node, t.packet_id}];
      }
    }
    CHECK_FALSE(sends.empty());
    for (const auto& [key, n] : sends) {
      CHECK(n == 1);
    }
  }
}

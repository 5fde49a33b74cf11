#include "manet/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace manet {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& msg) {
  throw ScenarioError(ScenarioError::Kind::Parse, field, msg);
}

[[noreturn]] void invalid(const std::string& field, const std::string& msg) {
  throw ScenarioError(ScenarioError::Kind::Validation, field, msg);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      parse_fail(join(where, key), "unknown key");
    }
  }
}

const json& require_object(const json& v, const std::string& field) {
  if (!v.is_object()) {
    parse_fail(field, "expected an object");
  }
  return v;
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) {
    parse_fail(field, "expected a number");
  }
  return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) {
    parse_fail(field, "expected an integer");
  }
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) {
      parse_fail(field, "integer out of range");
    }
    return static_cast<std::int64_t>(u);
  }
  return v.get<std::int64_t>();
}

std::uint64_t get_seed(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) {
    return v.get<std::uint64_t>();
  }
  if (v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i < 0) {
      parse_fail(field, "seed must be non-negative");
    }
    return static_cast<std::uint64_t>(i);
  }
  parse_fail(field, "expected an unsigned integer");
}

NodeId get_node(const json& v, const std::string& field) {
  const auto i = get_integer(v, field);
  if (i < INT32_MIN || i > INT32_MAX) {
    parse_fail(field, "node id out of range");
  }
  return static_cast<NodeId>(i);
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) {
    parse_fail(field, "expected a string");
  }
  return v.get<std::string>();
}

AttackKind parse_attack(const json& entry, const std::string& where, NodeId& node) {
  require_object(entry, where);
  reject_unknown_keys(entry, where, {"node", "kind", "params"});
  if (!entry.contains("node")) {
    parse_fail(join(where, "node"), "missing");
  }
  if (!entry.contains("kind")) {
    parse_fail(join(where, "kind"), "missing");
  }
  node = get_node(entry["node"], join(where, "node"));
  AttackKind kind;
  try {
    kind.type = parse_attack_type(get_string(entry["kind"], join(where, "kind")));
  } catch (const std::invalid_argument& e) {
    parse_fail(join(where, "kind"), e.what());
  }

  const std::string pwhere = join(where, "params");
  json params = entry.contains("params") ? entry["params"] : json::object();
  require_object(params, pwhere);
  auto need = [&](const char* key) -> const json& {
    if (!params.contains(key)) {
      invalid(join(pwhere, key), "required for " + std::string(to_string(kind.type)));
    }
    return params[key];
  };
  switch (kind.type) {
  case AttackType::BLACKHOLE:
  case AttackType::SINKHOLE:
  case AttackType::SPOOFED_ROUTING:
    reject_unknown_keys(params, pwhere, {});
    break;
  case AttackType::GREYHOLE:
    reject_unknown_keys(params, pwhere, {"drop_prob"});
    kind.drop_prob = get_number(need("drop_prob"), join(pwhere, "drop_prob"));
    break;
  case AttackType::WORMHOLE:
    reject_unknown_keys(params, pwhere, {"peer_id"});
    kind.peer = get_node(need("peer_id"), join(pwhere, "peer_id"));
    break;
  case AttackType::SYBIL:
    reject_unknown_keys(params, pwhere, {"identity_count"});
    kind.identity_count =
        static_cast<int>(get_integer(need("identity_count"), join(pwhere, "identity_count")));
    break;
  case AttackType::HELLO_FLOOD:
    reject_unknown_keys(params, pwhere, {"rate_multiplier"});
    kind.rate_multiplier = get_number(need("rate_multiplier"), join(pwhere, "rate_multiplier"));
    break;
  case AttackType::DOS_FLOOD:
    reject_unknown_keys(params, pwhere, {"rate_pkt_per_s", "victim"});
    kind.rate_pkt_per_s = get_number(need("rate_pkt_per_s"), join(pwhere, "rate_pkt_per_s"));
    if (params.contains("victim")) {
      kind.victim = get_node(params["victim"], join(pwhere, "victim"));
    }
    break;
  }
  return kind;
}

json attack_to_json(const AttackerSpec& a) {
  json params = json::object();
  const AttackKind& k = a.kind;
  switch (k.type) {
  case AttackType::GREYHOLE: params["drop_prob"] = k.drop_prob; break;
  case AttackType::WORMHOLE: params["peer_id"] = k.peer; break;
  case AttackType::SYBIL: params["identity_count"] = k.identity_count; break;
  case AttackType::HELLO_FLOOD: params["rate_multiplier"] = k.rate_multiplier; break;
  case AttackType::DOS_FLOOD:
    params["rate_pkt_per_s"] = k.rate_pkt_per_s;
    if (k.victim != kNoNode) {
      params["victim"] = k.victim;
    }
    break;
  default: break;
  }
  return json{{"node", a.node}, {"kind", std::string(to_string(k.type))}, {"params", params}};
}

} // namespace

ScenarioError::ScenarioError(Kind kind, std::string field, const std::string& what)
    : std::runtime_error((kind == Kind::Parse ? "parse error: " : "validation error: ") + field +
                         ": " + what),
      kind_(kind), field_(std::move(field)) {}

ScenarioConfig load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_fail("document", e.what());
  }
  require_object(doc, "document");
  reject_unknown_keys(doc, "",
                      {"node_count", "area", "radio_range_m", "speed_range", "pause_time_s",
                       "sim_duration_s", "traffic_flows", "protocol", "attackers", "seed",
                       "link_rate_bps", "per_hop_processing_s", "fuzzy_bounds",
                       "blacklist_timer_s", "block_size_txs", "difficulty", "initial_positions",
                       "hello_interval_s", "control_packet_bits", "queue_capacity",
                       "route_lifetime_s", "reverse_route_lifetime_s", "rreq_retries",
                       "rreq_timeout_s", "ack_timeout_s", "block_seal_timeout_s"});

  for (const char* key : {"node_count", "area", "radio_range_m", "sim_duration_s"}) {
    if (!doc.contains(key)) {
      parse_fail(key, "missing required field");
    }
  }

  ScenarioConfig c;
  c.node_count = static_cast<int>(get_integer(doc["node_count"], "node_count"));

  {
    const json& a = require_object(doc["area"], "area");
    reject_unknown_keys(a, "area", {"width_m", "height_m"});
    if (!a.contains("width_m") || !a.contains("height_m")) {
      parse_fail("area", "needs width_m and height_m");
    }
    c.area.width_m = get_number(a["width_m"], "area.width_m");
    c.area.height_m = get_number(a["height_m"], "area.height_m");
  }
  c.radio_range_m = get_number(doc["radio_range_m"], "radio_range_m");
  c.sim_duration_s = get_number(doc["sim_duration_s"], "sim_duration_s");

  if (doc.contains("speed_range")) {
    const json& s = require_object(doc["speed_range"], "speed_range");
    reject_unknown_keys(s, "speed_range", {"min", "max"});
    if (!s.contains("min") || !s.contains("max")) {
      parse_fail("speed_range", "needs min and max");
    }
    c.speed_range.min = get_number(s["min"], "speed_range.min");
    c.speed_range.max = get_number(s["max"], "speed_range.max");
  }
  if (doc.contains("fuzzy_bounds")) {
    const json& f = require_object(doc["fuzzy_bounds"], "fuzzy_bounds");
    reject_unknown_keys(f, "fuzzy_bounds", {"low_max_s", "high_min_s"});
    if (!f.contains("low_max_s") || !f.contains("high_min_s")) {
      parse_fail("fuzzy_bounds", "needs low_max_s and high_min_s");
    }
    c.fuzzy_bounds.low_max_s = get_number(f["low_max_s"], "fuzzy_bounds.low_max_s");
    c.fuzzy_bounds.high_min_s = get_number(f["high_min_s"], "fuzzy_bounds.high_min_s");
  }

  auto opt_number = [&](const char* key, double& out) {
    if (doc.contains(key)) {
      out = get_number(doc[key], key);
    }
  };
  auto opt_int = [&](const char* key, auto& out) {
    if (doc.contains(key)) {
      out = static_cast<std::remove_reference_t<decltype(out)>>(get_integer(doc[key], key));
    }
  };
  opt_number("pause_time_s", c.pause_time_s);
  opt_number("link_rate_bps", c.link_rate_bps);
  opt_number("per_hop_processing_s", c.per_hop_processing_s);
  opt_number("blacklist_timer_s", c.blacklist_timer_s);
  opt_number("difficulty", c.difficulty);
  opt_number("hello_interval_s", c.hello_interval_s);
  opt_number("route_lifetime_s", c.route_lifetime_s);
  opt_number("reverse_route_lifetime_s", c.reverse_route_lifetime_s);
  opt_number("rreq_timeout_s", c.rreq_timeout_s);
  opt_number("ack_timeout_s", c.ack_timeout_s);
  opt_number("block_seal_timeout_s", c.block_seal_timeout_s);
  opt_int("block_size_txs", c.block_size_txs);
  opt_int("queue_capacity", c.queue_capacity);
  opt_int("rreq_retries", c.rreq_retries);
  if (doc.contains("control_packet_bits")) {
    const auto bits = get_integer(doc["control_packet_bits"], "control_packet_bits");
    if (bits < 0 || bits > UINT32_MAX) {
      invalid("control_packet_bits", "must be in [0, 2^32)");
    }
    c.control_packet_bits = static_cast<std::uint32_t>(bits);
  }

  if (doc.contains("seed")) {
    c.seed = get_seed(doc["seed"], "seed");
  }
  if (doc.contains("protocol")) {
    try {
      c.protocol = parse_protocol(get_string(doc["protocol"], "protocol"));
    } catch (const std::invalid_argument& e) {
      parse_fail("protocol", e.what());
    }
  }

  if (doc.contains("traffic_flows")) {
    const json& flows = doc["traffic_flows"];
    if (!flows.is_array()) {
      parse_fail("traffic_flows", "expected an array");
    }
    for (std::size_t i = 0; i < flows.size(); ++i) {
      const std::string where = "traffic_flows[" + std::to_string(i) + "]";
      const json& f = require_object(flows[i], where);
      reject_unknown_keys(f, where,
                          {"src", "dst", "rate_pkt_per_s", "payload_bits", "start_s", "stop_s"});
      for (const char* key : {"src", "dst", "rate_pkt_per_s", "payload_bits"}) {
        if (!f.contains(key)) {
          parse_fail(join(where, key), "missing");
        }
      }
      TrafficFlow flow;
      flow.src = get_node(f["src"], join(where, "src"));
      flow.dst = get_node(f["dst"], join(where, "dst"));
      flow.rate_pkt_per_s = get_number(f["rate_pkt_per_s"], join(where, "rate_pkt_per_s"));
      const auto bits = get_integer(f["payload_bits"], join(where, "payload_bits"));
      if (bits <= 0 || bits > UINT32_MAX) {
        invalid(join(where, "payload_bits"), "must be in (0, 2^32)");
      }
      flow.payload_bits = static_cast<std::uint32_t>(bits);
      if (f.contains("start_s")) {
        flow.start_s = get_number(f["start_s"], join(where, "start_s"));
      }
      if (f.contains("stop_s")) {
        flow.stop_s = get_number(f["stop_s"], join(where, "stop_s"));
      }
      c.traffic_flows.push_back(flow);
    }
  }

  if (doc.contains("attackers")) {
    const json& atk = doc["attackers"];
    if (!atk.is_array()) {
      parse_fail("attackers", "expected an array");
    }
    for (std::size_t i = 0; i < atk.size(); ++i) {
      AttackerSpec spec;
      spec.kind = parse_attack(atk[i], "attackers[" + std::to_string(i) + "]", spec.node);
      c.attackers.push_back(spec);
    }
  }

  if (doc.contains("initial_positions")) {
    const json& pos = doc["initial_positions"];
    if (!pos.is_array()) {
      parse_fail("initial_positions", "expected an array of [x, y] pairs");
    }
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const std::string where = "initial_positions[" + std::to_string(i) + "]";
      if (!pos[i].is_array() || pos[i].size() != 2) {
        parse_fail(where, "expected [x, y]");
      }
      c.initial_positions.push_back(
          {get_number(pos[i][0], where + "[0]"), get_number(pos[i][1], where + "[1]")});
    }
  }

  validate(c);
  return c;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::ios_base::failure("cannot open scenario file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

void validate(const ScenarioConfig& c) {
  if (c.node_count < 2) {
    invalid("node_count", "must be >= 2");
  }
  if (!(c.area.width_m > 0)) {
    invalid("area.width_m", "must be > 0");
  }
  if (!(c.area.height_m > 0)) {
    invalid("area.height_m", "must be > 0");
  }
  if (!(c.radio_range_m > 0)) {
    invalid("radio_range_m", "must be > 0");
  }
  if (!(c.speed_range.min >= 0)) {
    invalid("speed_range.min", "must be >= 0");
  }
  if (!(c.speed_range.max >= c.speed_range.min)) {
    invalid("speed_range.max", "must be >= speed_range.min");
  }
  if (!(c.pause_time_s >= 0)) {
    invalid("pause_time_s", "must be >= 0");
  }
  if (!(c.sim_duration_s > 0)) {
    invalid("sim_duration_s", "must be > 0");
  }
  if (!(c.link_rate_bps > 0)) {
    invalid("link_rate_bps", "must be > 0");
  }
  if (!(c.per_hop_processing_s >= 0)) {
    invalid("per_hop_processing_s", "must be >= 0");
  }
  if (!(c.fuzzy_bounds.low_max_s >= 0)) {
    invalid("fuzzy_bounds.low_max_s", "must be >= 0");
  }
  if (!(c.fuzzy_bounds.low_max_s < c.fuzzy_bounds.high_min_s)) {
    invalid("fuzzy_bounds", "low_max_s must be < high_min_s");
  }
  if (!(c.blacklist_timer_s > 0)) {
    invalid("blacklist_timer_s", "must be > 0");
  }
  if (c.block_size_txs < 1) {
    invalid("block_size_txs", "must be >= 1");
  }
  if (!(c.difficulty > 0)) {
    invalid("difficulty", "must be > 0");
  }
  if (!(c.hello_interval_s >= 0)) {
    invalid("hello_interval_s", "must be >= 0 (0 disables)");
  }
  if (c.queue_capacity < 1) {
    invalid("queue_capacity", "must be >= 1");
  }
  if (!(c.route_lifetime_s > 0)) {
    invalid("route_lifetime_s", "must be > 0");
  }
  if (!(c.reverse_route_lifetime_s > 0)) {
    invalid("reverse_route_lifetime_s", "must be > 0");
  }
  if (c.rreq_retries < 0) {
    invalid("rreq_retries", "must be >= 0");
  }
  if (!(c.rreq_timeout_s > 0)) {
    invalid("rreq_timeout_s", "must be > 0");
  }
  if (!(c.ack_timeout_s > 0)) {
    invalid("ack_timeout_s", "must be > 0");
  }
  if (!(c.block_seal_timeout_s > 0)) {
    invalid("block_seal_timeout_s", "must be > 0");
  }

  auto valid_node = [&](NodeId n) { return n >= 0 && n < c.node_count; };
  for (std::size_t i = 0; i < c.traffic_flows.size(); ++i) {
    const auto& f = c.traffic_flows[i];
    const std::string where = "traffic_flows[" + std::to_string(i) + "]";
    if (!valid_node(f.src)) {
      invalid(where + ".src", "must be a node id < node_count");
    }
    if (!valid_node(f.dst)) {
      invalid(where + ".dst", "must be a node id < node_count");
    }
    if (f.src == f.dst) {
      invalid(where + ".dst", "must differ from src");
    }
    if (!(f.rate_pkt_per_s > 0)) {
      invalid(where + ".rate_pkt_per_s", "must be > 0");
    }
    if (f.payload_bits == 0) {
      invalid(where + ".payload_bits", "must be > 0");
    }
    if (!(f.start_s >= 0)) {
      invalid(where + ".start_s", "must be >= 0");
    }
    if (f.stop_s && !(*f.stop_s >= f.start_s)) {
      invalid(where + ".stop_s", "must be >= start_s");
    }
  }

  std::set<NodeId> seen;
  for (std::size_t i = 0; i < c.attackers.size(); ++i) {
    const auto& a = c.attackers[i];
    const std::string where = "attackers[" + std::to_string(i) + "]";
    if (!valid_node(a.node)) {
      invalid(where + ".node", "must be a node id < node_count");
    }
    if (!seen.insert(a.node).second) {
      invalid(where + ".node", "node already configured as an attacker");
    }
    if (auto bad = a.kind.invalid_param(); !bad.empty()) {
      invalid(where + ".params." + bad, "out of range for " + std::string(to_string(a.kind.type)));
    }
    if (a.kind.type == AttackType::WORMHOLE) {
      if (!valid_node(a.kind.peer) || a.kind.peer == a.node) {
        invalid(where + ".params.peer_id", "must be another node id < node_count");
      }
    }
    if (a.kind.type == AttackType::DOS_FLOOD && a.kind.victim != kNoNode &&
        (!valid_node(a.kind.victim) || a.kind.victim == a.node)) {
      invalid(where + ".params.victim", "must be another node id < node_count");
    }
  }

  if (!c.initial_positions.empty()) {
    if (c.initial_positions.size() != static_cast<std::size_t>(c.node_count)) {
      invalid("initial_positions", "must list exactly node_count positions");
    }
    for (std::size_t i = 0; i < c.initial_positions.size(); ++i) {
      const auto& p = c.initial_positions[i];
      if (!(p.x >= 0 && p.x <= c.area.width_m && p.y >= 0 && p.y <= c.area.height_m)) {
        invalid("initial_positions[" + std::to_string(i) + "]", "outside the area");
      }
    }
  }
}

std::string dump_scenario(const ScenarioConfig& c) {
  json doc;
  doc["node_count"] = c.node_count;
  doc["area"] = {{"width_m", c.area.width_m}, {"height_m", c.area.height_m}};
  doc["radio_range_m"] = c.radio_range_m;
  doc["speed_range"] = {{"min", c.speed_range.min}, {"max", c.speed_range.max}};
  doc["pause_time_s"] = c.pause_time_s;
  doc["sim_duration_s"] = c.sim_duration_s;
  json flows = json::array();
  for (const auto& f : c.traffic_flows) {
    json jf = {{"src", f.src},
               {"dst", f.dst},
               {"rate_pkt_per_s", f.rate_pkt_per_s},
               {"payload_bits", f.payload_bits},
               {"start_s", f.start_s}};
    if (f.stop_s) {
      jf["stop_s"] = *f.stop_s;
    }
    flows.push_back(jf);
  }
  doc["traffic_flows"] = flows;
  doc["protocol"] = std::string(to_string(c.protocol));
  json atk = json::array();
  for (const auto& a : c.attackers) {
    atk.push_back(attack_to_json(a));
  }
  doc["attackers"] = atk;
  doc["seed"] = c.seed;
  doc["link_rate_bps"] = c.link_rate_bps;
  doc["per_hop_processing_s"] = c.per_hop_processing_s;
  doc["fuzzy_bounds"] = {{"low_max_s", c.fuzzy_bounds.low_max_s},
                         {"high_min_s", c.fuzzy_bounds.high_min_s}};
  doc["blacklist_timer_s"] = c.blacklist_timer_s;
  doc["block_size_txs"] = c.block_size_txs;
  doc["difficulty"] = c.difficulty;
  if (!c.initial_positions.empty()) {
    json pos = json::array();
    for (const auto& p : c.initial_positions) {
      pos.push_back({p.x, p.y});
    }
    doc["initial_positions"] = pos;
  }
  doc["hello_interval_s"] = c.hello_interval_s;
  doc["control_packet_bits"] = c.control_packet_bits;
  doc["queue_capacity"] = c.queue_capacity;
  doc["route_lifetime_s"] = c.route_lifetime_s;
  doc["reverse_route_lifetime_s"] = c.reverse_route_lifetime_s;
  doc["rreq_retries"] = c.rreq_retries;
  doc["rreq_timeout_s"] = c.rreq_timeout_s;
  doc["ack_timeout_s"] = c.ack_timeout_s;
  doc["block_seal_timeout_s"] = c.block_seal_timeout_s;
  return doc.dump(2) + "\n";
}

} // namespace manet

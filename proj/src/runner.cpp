#include "manet/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "manet/adversary.hpp"
#include "manet/metrics.hpp"
#include "manet/simulator.hpp"

namespace manet {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string_view s) {
  std::string r(s);
  std::transform(r.begin(), r.end(), r.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return r;
}

fs::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw CommandError(kExitIo, "cannot create output directory '" + dir + "'");
  }
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw CommandError(kExitIo, "cannot open '" + path.string() + "' for writing");
  }
  os << content;
  os.flush();
  if (!os) {
    throw CommandError(kExitIo, "write failed for '" + path.string() + "'");
  }
}

std::string csv_document(const std::vector<RunRecord>& records) {
  std::string s(kCsvHeader);
  s += '\n';
  for (const auto& r : records) {
    s += to_csv_line(r.row);
    s += '\n';
  }
  return s;
}

std::vector<MetricsReport> reports_of(const std::vector<RunRecord>& records) {
  std::vector<MetricsReport> v;
  v.reserve(records.size());
  for (const auto& r : records) {
    v.push_back(r.row.report);
  }
  return v;
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const CommandError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

} // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) {
      out.push_back(item.substr(b, e - b + 1));
    }
  }
  return out;
}

std::vector<std::uint64_t> resolve_seeds(std::optional<std::uint64_t> count,
                                         const std::optional<std::string>& list,
                                         std::uint64_t scenario_seed) {
  if (count && list) {
    throw CommandError(kExitInput, "--seeds and --seed-list are mutually exclusive");
  }
  std::vector<std::uint64_t> seeds;
  if (count) {
    if (*count == 0) {
      throw CommandError(kExitInput, "--seeds: must be at least 1");
    }
    for (std::uint64_t s = 1; s <= *count; ++s) {
      seeds.push_back(s);
    }
  } else if (list) {
    for (const auto& item : split_list(*list)) {
      std::uint64_t v = 0;
      const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
      if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
        throw CommandError(kExitInput, "--seed-list: '" + item + "' is not an unsigned integer");
      }
      seeds.push_back(v);
    }
    if (seeds.empty()) {
      throw CommandError(kExitInput, "--seed-list: no seeds given");
    }
  } else {
    seeds.push_back(scenario_seed);
  }
  return seeds;
}

ScenarioConfig load_scenario_or_throw(const std::string& path) {
  if (path.empty()) {
    throw CommandError(kExitInput, "--scenario is required");
  }
  return load_scenario_file(path);
}

std::vector<RunRecord> run_batch(const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds,
                                 const std::string& label, bool keep_trace, int jobs,
                                 std::ostream* progress) {
  std::vector<RunRecord> results(seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) {
        return;
      }
      try {
        ScenarioConfig cfg = base;
        cfg.seed = seeds[i];
        const SimResult sim = run_simulation(cfg);
        RunRecord& rec = results[i];
        rec.row.run_id = label + "-s" + std::to_string(seeds[i]);
        rec.row.protocol = std::string(to_string(cfg.protocol));
        rec.row.seed = seeds[i];
        rec.row.report = compute_report(sim, cfg);
        if (keep_trace) {
          rec.trace_jsonl = sim.trace.to_jsonl();
        }
        if (progress != nullptr) {
          std::lock_guard lock(progress_mutex);
          *progress << "[" << label << "] seed " << seeds[i] << " done\n";
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return results;
}

ScenarioConfig with_attack(const ScenarioConfig& base, AttackType type) {
  ScenarioConfig cfg = base;
  std::vector<NodeId> nodes;
  for (const auto& a : base.attackers) {
    nodes.push_back(a.node);
  }
  if (nodes.empty()) {
    std::set<NodeId> endpoints;
    for (const auto& f : base.traffic_flows) {
      endpoints.insert(f.src);
      endpoints.insert(f.dst);
    }
    for (NodeId n = base.node_count - 1; n >= 0 && nodes.size() < 4; --n) {
      if (endpoints.count(n) == 0) {
        nodes.push_back(n);
      }
    }
    std::sort(nodes.begin(), nodes.end());
  }
  if (nodes.empty()) {
    throw CommandError(kExitInput, "scenario has no node available to act as an attacker");
  }
  if (type == AttackType::WORMHOLE && nodes.size() < 2) {
    throw CommandError(kExitInput, "WORMHOLE needs at least two attacker nodes");
  }

  cfg.attackers.clear();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    AttackKind kind;
    switch (type) {
    case AttackType::BLACKHOLE: kind = AttackKind::blackhole(); break;
    case AttackType::GREYHOLE: kind = AttackKind::greyhole(0.5); break;
    case AttackType::WORMHOLE: {
      // Consecutive pairs; an odd one out links to the first attacker.
      const std::size_t j = (i % 2 == 0) ? (i + 1 < nodes.size() ? i + 1 : 0) : i - 1;
      kind = AttackKind::wormhole(nodes[j]);
      break;
    }
    case AttackType::SYBIL: kind = AttackKind::sybil(4); break;
    case AttackType::SINKHOLE: kind = AttackKind::sinkhole(); break;
    case AttackType::HELLO_FLOOD: kind = AttackKind::hello_flood(10.0); break;
    case AttackType::SPOOFED_ROUTING: kind = AttackKind::spoofed_routing(); break;
    case AttackType::DOS_FLOOD: kind = AttackKind::dos_flood(20.0); break;
    }
    cfg.attackers.push_back({nodes[i], kind});
  }
  validate(cfg);
  return cfg;
}

int cmd_run(const RunManifest& manifest, const std::optional<std::string>& protocol, int jobs,
            std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig cfg = load_scenario_or_throw(manifest.scenario_path);
    if (protocol) {
      cfg.protocol = parse_protocol(*protocol);
    }
    if (manifest.seeds.empty()) {
      throw CommandError(kExitInput, "no seeds given");
    }
    if (manifest.output_dir.empty()) {
      throw CommandError(kExitInput, "--out is required for run");
    }
    const fs::path dir = prepare_output_dir(manifest.output_dir);
    const std::string label = lower(to_string(cfg.protocol));
    const auto records = run_batch(cfg, manifest.seeds, label, manifest.emit_trace, jobs, &err);
    write_file(dir / "metrics.csv", csv_document(records));
    if (manifest.emit_trace) {
      for (const auto& r : records) {
        write_file(dir / ("trace_" + r.row.run_id + ".jsonl"), r.trace_jsonl);
      }
    }
    out << "wrote " << records.size() << " run(s) to " << (dir / "metrics.csv").string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int cmd_compare(const RunManifest& manifest, const std::vector<std::string>& protocols, int jobs,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ScenarioConfig base = load_scenario_or_throw(manifest.scenario_path);
    if (manifest.seeds.empty()) {
      throw CommandError(kExitInput, "no seeds given");
    }
    std::vector<Protocol> chosen;
    for (const auto& name : protocols) {
      const Protocol p = parse_protocol(name);
      if (std::find(chosen.begin(), chosen.end(), p) == chosen.end()) {
        chosen.push_back(p);
      }
    }
    if (chosen.empty()) {
      chosen = {Protocol::AODV, Protocol::QAODV, Protocol::SRABC};
    }

    std::vector<RunRecord> all;
    std::vector<AggregateRow> rows;
    for (Protocol p : chosen) {
      ScenarioConfig cfg = base;
      cfg.protocol = p;
      const std::string label(to_string(p));
      auto records =
          run_batch(cfg, manifest.seeds, lower(label), manifest.emit_trace, jobs, &err);
      rows.push_back(aggregate(label, reports_of(records)));
      all.insert(all.end(), std::make_move_iterator(records.begin()),
                 std::make_move_iterator(records.end()));
    }
    const std::string table = render_aggregate_table(rows);
    out << table;
    if (!manifest.output_dir.empty()) {
      const fs::path dir = prepare_output_dir(manifest.output_dir);
      write_file(dir / "compare.csv", csv_document(all));
      write_file(dir / "compare.txt", table);
      if (manifest.emit_trace) {
        for (const auto& r : all) {
          write_file(dir / ("trace_" + r.row.run_id + ".jsonl"), r.trace_jsonl);
        }
      }
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_attack_matrix(const RunManifest& manifest, const std::vector<std::string>& attack_kinds,
                      int jobs, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<AttackType> kinds;
    for (const auto& name : attack_kinds) {
      kinds.push_back(parse_attack_type(name));
    }
    if (kinds.empty()) {
      kinds.assign(std::begin(kAllAttackTypes), std::end(kAllAttackTypes));
    }
    ScenarioConfig base = load_scenario_or_throw(manifest.scenario_path);
    base.protocol = Protocol::SRABC;
    if (manifest.seeds.empty()) {
      throw CommandError(kExitInput, "no seeds given");
    }

    std::vector<RunRecord> all;
    std::vector<std::vector<std::string>> cells{
        {"attack", "runs", "detection_rate_pct", "pdr_pct", "security_level_pct"}};
    for (AttackType t : kinds) {
      const ScenarioConfig cfg = with_attack(base, t);
      const std::string label(to_string(t));
      auto records =
          run_batch(cfg, manifest.seeds, lower(label), manifest.emit_trace, jobs, &err);
      const AggregateRow agg = aggregate(label, reports_of(records));
      auto cell = [](const MeanStd& ms, int d) {
        return format_trimmed(ms.mean, d) + " ± " + format_trimmed(ms.stdev, d);
      };
      cells.push_back({label, std::to_string(agg.runs), cell(agg.detection_rate_pct, 1),
                       cell(agg.pdr_pct, 2), cell(agg.security_level_pct, 1)});
      all.insert(all.end(), std::make_move_iterator(records.begin()),
                 std::make_move_iterator(records.end()));
    }

    std::vector<std::size_t> width(cells.front().size(), 0);
    auto cps = [](const std::string& s) {
      return static_cast<std::size_t>(
          std::count_if(s.begin(), s.end(), [](unsigned char c) { return (c & 0xC0) != 0x80; }));
    };
    for (const auto& line : cells) {
      for (std::size_t i = 0; i < line.size(); ++i) {
        width[i] = std::max(width[i], cps(line[i]));
      }
    }
    std::ostringstream table;
    for (const auto& line : cells) {
      for (std::size_t i = 0; i < line.size(); ++i) {
        table << (i > 0 ? " | " : "") << line[i];
        if (i + 1 < line.size()) {
          table << std::string(width[i] - cps(line[i]), ' ');
        }
      }
      table << '\n';
    }
    out << table.str();
    if (!manifest.output_dir.empty()) {
      const fs::path dir = prepare_output_dir(manifest.output_dir);
      write_file(dir / "attack_matrix.csv", csv_document(all));
      write_file(dir / "attack_matrix.txt", table.str());
      if (manifest.emit_trace) {
        for (const auto& r : all) {
          write_file(dir / ("trace_" + r.row.run_id + ".jsonl"), r.trace_jsonl);
        }
      }
    }
    return static_cast<int>(kExitOk);
  });
}

} // namespace manet

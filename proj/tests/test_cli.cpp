#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "manet/runner.hpp"
#include "test_support.hpp"

using namespace manet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("manet_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_scenario(const fs::path& dir, const std::string& name, const std::string& body) {
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p.string();
}

const char* kTwoNode = R"({"node_count": 2, "area": {"width_m": 200, "height_m": 200},
  "radio_range_m": 250, "speed_range": {"min": 0, "max": 0}, "sim_duration_s": 10,
  "initial_positions": [[50, 100], [150, 100]],
  "traffic_flows": [{"src": 0, "dst": 1, "rate_pkt_per_s": 2, "payload_bits": 4096}]})";

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

struct ProcResult {
  int code = -1;
  std::string out;
};

/// Runs the tool; stderr is merged into `out` unless `stdout_only`.
ProcResult run_tool(const std::string& args, bool stdout_only = false) {
  const std::string cmd =
      std::string(MANETSIM_BIN) + " " + args + (stdout_only ? " 2>/dev/null" : " 2>&1");
  ProcResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
    r.out.append(buf, n);
  }
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

} // namespace

TEST_CASE("run: two-node scenario, one seed, one row") {
  const fs::path dir = scratch("run1");
  RunManifest m{write_scenario(dir, "s.json", kTwoNode), (dir / "out").string(), true, {1}};
  std::ostringstream out, err;
  CHECK(cmd_run(m, std::nullopt, 1, out, err) == kExitOk);
  const std::string csv = read_text((dir / "out" / "metrics.csv").string());
  CHECK(line_count(csv) == 2);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  const CsvRow row = parse_csv_line(csv.substr(csv.find('\n') + 1, csv.size() - csv.find('\n') - 2));
  CHECK(row.protocol == "AODV");
  CHECK(row.report.pdr_pct == 100.0);
  CHECK(fs::exists(dir / "out" / "trace_aodv-s1.jsonl"));
}

TEST_CASE("run: ten seeds, deterministic per seed and across job counts") {
  const fs::path dir = scratch("run10");
  const std::string scen = test_data("blackhole_20.json");
  RunManifest a{scen, (dir / "a").string(), false, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}};
  RunManifest b{scen, (dir / "b").string(), false, a.seeds};
  std::ostringstream out, err;
  CHECK(cmd_run(a, std::string("AODV"), 1, out, err) == kExitOk);
  CHECK(cmd_run(b, std::string("AODV"), 3, out, err) == kExitOk);
  const std::string csv_a = read_text((dir / "a" / "metrics.csv").string());
  CHECK(line_count(csv_a) == 11);
  CHECK(csv_a == read_text((dir / "b" / "metrics.csv").string()));
  std::istringstream lines(csv_a);
  std::string line;
  std::getline(lines, line);
  std::uint64_t expect_seed = 1;
  while (std::getline(lines, line)) {
    CHECK(parse_csv_line(line).seed == expect_seed++);
  }
}

TEST_CASE("run: malformed scenario names the field and exits 1") {
  const fs::path dir = scratch("bad");
  std::string body = kTwoNode;
  body.replace(body.find("\"radio_range_m\": 250"), 20, "\"radio_range_m\": \"far\"");
  RunManifest m{write_scenario(dir, "bad.json", body), (dir / "out").string(), false, {1}};
  std::ostringstream out, err;
  CHECK(cmd_run(m, std::nullopt, 1, out, err) == kExitInput);
  CHECK(err.str().find("radio_range_m") != std::string::npos);

  RunManifest broken{write_scenario(dir, "broken.json", "{\"node_count\": 2,"), "", false, {1}};
  CHECK(cmd_run(broken, std::nullopt, 1, out, err) == kExitInput);
}

TEST_CASE("run: I/O failures exit 2") {
  const fs::path dir = scratch("io");
  std::ostringstream out, err;
  RunManifest missing{(dir / "nope.json").string(), (dir / "out").string(), false, {1}};
  CHECK(cmd_run(missing, std::nullopt, 1, out, err) == kExitIo);
  const std::string scen = write_scenario(dir, "s.json", kTwoNode);
  std::ofstream(dir / "file") << "x";
  RunManifest blocked{scen, (dir / "file" / "sub").string(), false, {1}};
  CHECK(cmd_run(blocked, std::nullopt, 1, out, err) == kExitIo);
}

TEST_CASE("compare: one row per protocol, byte-identical reruns") {
  const fs::path dir = scratch("cmp");
  const std::string scen = test_data("blackhole_20.json");
  RunManifest m{scen, (dir / "out").string(), false, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}};
  std::ostringstream first, second, err;
  CHECK(cmd_compare(m, {"AODV", "SRABC"}, 2, first, err) == kExitOk);
  CHECK(line_count(first.str()) == 3);
  CHECK(first.str().find("AODV") != std::string::npos);
  CHECK(first.str().find("SRABC") != std::string::npos);
  const std::string csv = read_text((dir / "out" / "compare.csv").string());
  CHECK(line_count(csv) == 21);
  CHECK(cmd_compare(m, {"AODV", "SRABC"}, 1, second, err) == kExitOk);
  CHECK(first.str() == second.str());
  CHECK(csv == read_text((dir / "out" / "compare.csv").string()));

  std::ostringstream single;
  RunManifest one{scen, "", false, {1}};
  CHECK(cmd_compare(one, {"QAODV"}, 1, single, err) == kExitOk);
  CHECK(line_count(single.str()) == 2);
  std::ostringstream bad;
  CHECK(cmd_compare(one, {"DSR"}, 1, bad, err) == kExitInput);
}

TEST_CASE("attack-matrix: rows per kind and out-of-scope names") {
  const std::string scen = test_data("blackhole_20.json");
  std::ostringstream out, err;
  RunManifest m{scen, "", false, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}};
  CHECK(cmd_attack_matrix(m, {"BLACKHOLE"}, 2, out, err) == kExitOk);
  CHECK(line_count(out.str()) == 2);
  CHECK(out.str().find("BLACKHOLE") != std::string::npos);

  std::ostringstream all;
  RunManifest one{scen, "", false, {1}};
  CHECK(cmd_attack_matrix(one, {}, 1, all, err) == kExitOk);
  CHECK(line_count(all.str()) == 9);
  for (AttackType t : kAllAttackTypes) {
    CHECK(all.str().find(std::string(to_string(t))) != std::string::npos);
  }

  std::ostringstream r2l_err;
  CHECK(cmd_attack_matrix(one, {"R2L"}, 1, out, r2l_err) == kExitInput);
  CHECK(r2l_err.str().find("out of scope") != std::string::npos);
  std::ostringstream unknown_err;
  CHECK(cmd_attack_matrix(one, {"TELEPORT"}, 1, out, unknown_err) == kExitInput);
}

TEST_CASE("with_attack picks non-endpoint nodes when none are configured") {
  ScenarioConfig c = load_scenario_file(test_data("blackhole_20.json"));
  c.attackers.clear();
  const ScenarioConfig w = with_attack(c, AttackType::WORMHOLE);
  REQUIRE(w.attackers.size() == 4);
  CHECK(w.attackers[0].node == 16);
  CHECK(w.attackers[0].kind.peer == 17);
  CHECK(w.attackers[1].kind.peer == 16);
}

TEST_CASE("resolve_seeds") {
  CHECK(resolve_seeds(3, std::nullopt, 9) == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(resolve_seeds(std::nullopt, std::string("5, 7,11"), 9) ==
        std::vector<std::uint64_t>{5, 7, 11});
  CHECK(resolve_seeds(std::nullopt, std::nullopt, 9) == std::vector<std::uint64_t>{9});
  CHECK_THROWS_AS(resolve_seeds(2, std::string("1"), 9), CommandError);
  CHECK_THROWS_AS(resolve_seeds(std::nullopt, std::string("x"), 9), CommandError);
  CHECK_THROWS_AS(resolve_seeds(0, std::nullopt, 9), CommandError);
}

TEST_CASE("binary: exit codes for every failure class") {
  const fs::path dir = scratch("bin");
  const std::string scen = write_scenario(dir, "s.json", kTwoNode);
  const std::string out = (dir / "out").string();

  auto ok = run_tool("run --scenario " + scen + " --out " + out + " --seeds 2");
  CHECK(ok.code == 0);
  CHECK(line_count(read_text(out + "/metrics.csv")) == 3);

  CHECK(run_tool("run --scenario " + scen).code == 1);  // --out missing
  CHECK(run_tool("run --out " + out).code == 1);        // --scenario missing
  CHECK(run_tool("frobnicate").code == 1);
  CHECK(run_tool("run --scenario " + scen + " --out " + out + " --seeds 2 --seed-list 1").code ==
        1);
  CHECK(run_tool("run --scenario " + scen + " --out " + out + " --protocol DSR").code == 1);
  CHECK(run_tool("run --scenario " + (dir / "missing.json").string() + " --out " + out).code == 2);

  auto r2l = run_tool("attack-matrix --scenario " + test_data("blackhole_20.json") +
                      " --attacks R2L");
  CHECK(r2l.code == 1);
  CHECK(r2l.out.find("out of scope") != std::string::npos);

  auto cmp = run_tool("compare --scenario " + test_data("blackhole_20.json") +
                      " --seed-list 1,2 --protocol AODV,SRABC", true);
  CHECK(cmp.code == 0);
  auto cmp_again = run_tool("compare --scenario " + test_data("blackhole_20.json") +
                            " --seed-list 1,2 --protocol AODV,SRABC --jobs 2", true);
  CHECK(cmp.out == cmp_again.out);
}

#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "manet/runner.hpp"

namespace {

struct CommonFlags {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seeds;
  std::optional<std::string> seed_list;
  bool emit_trace = false;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario, "Scenario JSON file")->required();
  cmd->add_option("--out", f.out, "Output directory");
  auto* n = cmd->add_option("--seeds", f.seeds, "Run seeds 1..N");
  auto* l = cmd->add_option("--seed-list", f.seed_list, "Comma separated seeds");
  n->excludes(l);
  cmd->add_flag("--emit-trace", f.emit_trace, "Write one JSONL trace per run");
  cmd->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event MANET simulator with AODV, Q-AODV and SRABC routing"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::optional<std::string> run_protocol;
  auto* run = app.add_subcommand("run", "Run one scenario for each seed and write metrics.csv");
  add_common(run, run_flags);
  run->add_option("--protocol", run_protocol, "Override the scenario protocol");

  CommonFlags cmp_flags;
  std::string cmp_protocols;
  auto* cmp = app.add_subcommand("compare", "Compare protocols over the same seeds");
  add_common(cmp, cmp_flags);
  cmp->add_option("--protocol", cmp_protocols, "Comma separated protocols (default: all)");

  CommonFlags atk_flags;
  std::string atk_list;
  auto* atk = app.add_subcommand("attack-matrix", "Detection rate of SRABC per attack kind");
  add_common(atk, atk_flags);
  atk->add_option("--attacks", atk_list, "Comma separated attack kinds (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : manet::kExitInput;
  }

  auto manifest_of = [](const CommonFlags& f) {
    manet::RunManifest m;
    m.scenario_path = f.scenario;
    m.output_dir = f.out;
    m.emit_trace = f.emit_trace;
    return m;
  };

  auto resolve = [&](const CommonFlags& f, manet::RunManifest& m) -> int {
    try {
      const auto cfg = manet::load_scenario_or_throw(f.scenario);
      m.seeds = manet::resolve_seeds(f.seeds, f.seed_list, cfg.seed);
      return manet::kExitOk;
    } catch (const manet::CommandError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return e.code();
    } catch (const manet::ScenarioError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return manet::kExitInput;
    } catch (const std::ios_base::failure& e) {
      std::cerr << "error: " << e.what() << '\n';
      return manet::kExitIo;
    }
  };

  if (run->parsed()) {
    manet::RunManifest m = manifest_of(run_flags);
    if (int rc = resolve(run_flags, m); rc != 0) {
      return rc;
    }
    return manet::cmd_run(m, run_protocol, run_flags.jobs, std::cout, std::cerr);
  }
  if (cmp->parsed()) {
    manet::RunManifest m = manifest_of(cmp_flags);
    if (int rc = resolve(cmp_flags, m); rc != 0) {
      return rc;
    }
    return manet::cmd_compare(m, manet::split_list(cmp_protocols), cmp_flags.jobs, std::cout,
                              std::cerr);
  }
  manet::RunManifest m = manifest_of(atk_flags);
  if (int rc = resolve(atk_flags, m); rc != 0) {
    return rc;
  }
  return manet::cmd_attack_matrix(m, manet::split_list(atk_list), atk_flags.jobs, std::cout,
                                  std::cerr);
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "manet/config.hpp"
#include "manet/report.hpp"

namespace manet {

struct RunManifest {
  std::string scenario_path;
  std::string output_dir;
  bool emit_trace = false;
  std::vector<std::uint64_t> seeds;
};

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,  // parse or validation failure, unknown names, bad flags
  kExitIo = 2,     // unreadable scenario, unwritable output
};

/// Failure carrying the exit code the command should return.
class CommandError : public std::runtime_error {
public:
  CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

private:
  int code_;
};

struct RunRecord {
  CsvRow row;
  /// JSONL trace; empty unless requested.
  std::string trace_jsonl;
};

/// Runs `base` once per seed on up to `jobs` worker threads. Results come
/// back in seed order no matter which worker finished first. `label` prefixes
/// each run_id.
std::vector<RunRecord> run_batch(const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds,
                                 const std::string& label, bool keep_trace, int jobs,
                                 std::ostream* progress);

/// `base` with every attacker switched to `type` using default parameters.
/// When the scenario lists no attackers, up to four nodes that are not flow
/// endpoints are picked from the top of the id range.
ScenarioConfig with_attack(const ScenarioConfig& base, AttackType type);

/// Seeds from "--seeds N" (1..N) or "--seed-list a,b,c". Exactly one of the
/// two may be given; neither means the single seed from the scenario.
std::vector<std::uint64_t> resolve_seeds(std::optional<std::uint64_t> count,
                                         const std::optional<std::string>& list,
                                         std::uint64_t scenario_seed);

/// Comma separated list, empty items dropped.
std::vector<std::string> split_list(const std::string& text);

ScenarioConfig load_scenario_or_throw(const std::string& path);

int cmd_run(const RunManifest& manifest, const std::optional<std::string>& protocol, int jobs,
            std::ostream& out, std::ostream& err);

int cmd_compare(const RunManifest& manifest, const std::vector<std::string>& protocols, int jobs,
                std::ostream& out, std::ostream& err);

int cmd_attack_matrix(const RunManifest& manifest, const std::vector<std::string>& attack_kinds,
                      int jobs, std::ostream& out, std::ostream& err);

} // namespace manet

#pragma once
// The driver's subcommands. Each writes CSV files into the output directory
// and fills in the run manifest; exceptions carry the exit status.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "run_config.hpp"

namespace bouss::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kBlowUp = 3,
  kMissingInput = 4,
};

struct RunContext {
  RunConfig config;
  std::filesystem::path out_dir;
  int threads = 1;
  std::uint64_t seed = 0;
  nlohmann::json manifest;

  /// Records a file written under out_dir.
  void add_output(const std::string& file, nlohmann::json info = nlohmann::json::object());
  /// Adds the wall time since `since` under timings_s.<name>.
  void add_timing(const std::string& name, std::chrono::steady_clock::time_point since);
};

/// Manifest skeleton: versions, effective config, run flags.
nlohmann::json manifest_header(const std::string& command, const RunContext& ctx);
void write_manifest(const RunContext& ctx);

void cmd_simulate(RunContext& ctx);
void cmd_error_table(RunContext& ctx);
void cmd_scattering(RunContext& ctx);
void cmd_asymptotics(RunContext& ctx);
/// Randomized spectral checks driven by --seed. Returns false on a failure.
bool cmd_self_test(RunContext& ctx);

}  // namespace bouss::cli

// Command-line driver: simulate, error-table, scattering, asymptotics.

#include <CLI11.hpp>
#include <iostream>

#include "bouss/errors.hpp"
#include "commands.hpp"

namespace {

using namespace bouss;
using namespace bouss::cli;

int finish(RunContext& ctx, int code, const std::string& status, const std::string& message = {}) {
  ctx.manifest["status"] = status;
  if (!message.empty()) ctx.manifest["message"] = message;
  ctx.manifest["exit_code"] = code;
  write_manifest(ctx);
  return code;
}

int run(const std::string& command, const std::string& config_path, RunContext& ctx) {
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << ctx.out_dir << ": " << ec.message() << '\n';
    return kConfigError;
  }
  if (command != "self-test") {
    try {
      ctx.config = load_config(config_path);
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << '\n';
      ctx.manifest = {{"manifest_version", 1}, {"command", command}, {"config_file", config_path}};
      return finish(ctx, kConfigError, "config-error", e.what());
    }
  }
  ctx.manifest = manifest_header(command, ctx);
  if (!config_path.empty()) ctx.manifest["run"]["config_file"] = config_path;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (command == "simulate") cmd_simulate(ctx);
    else if (command == "error-table") cmd_error_table(ctx);
    else if (command == "scattering") cmd_scattering(ctx);
    else if (command == "asymptotics") cmd_asymptotics(ctx);
    else if (!cmd_self_test(ctx)) return finish(ctx, kFailure, "failed", "self-test failure");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return finish(ctx, kConfigError, "config-error", e.what());
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << " (last finite state at t = " << e.last_finite().t
              << " saved to snapshot_last_finite.csv)\n";
    return finish(ctx, kBlowUp, "blow-up", e.what());
  } catch (const MissingInputError& e) {
    std::cerr << "missing input: " << e.what() << '\n';
    return finish(ctx, kMissingInput, "missing-input", e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return finish(ctx, kFailure, "error", e.what());
  }
  ctx.add_timing("total", t0);
  return finish(ctx, kOk, "ok");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier scheme, direct scattering and long-time asymptotics for the bad Boussinesq equation"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  int threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "worker threads for independent spectral evaluations")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for randomized self-tests");

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "run the scheme and write one CSV per snapshot"},
      {"error-table", "run the scheme and tabulate the L-infinity error against a reference"},
      {"scattering", "tabulate s(k) and r1(k), optionally locating the soliton zero"},
      {"asymptotics", "tabulate A2, phase shifts and u_sol parameters on a zeta grid"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration or run manifest")->required();
    sub->add_option("--out", out_dir, "output directory for this run")->required();
  }
  auto* self = app.add_subcommand("self-test", "randomized spectral checks using --seed");
  self->add_option("--out", out_dir, "output directory for this run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.threads = threads;
  ctx.seed = seed;
  return run(app.get_subcommands().front()->get_name(), config_path, ctx);
}

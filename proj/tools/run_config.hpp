#pragma once
// Run configuration for the command-line driver: a versioned JSON document
// that is validated field by field before anything runs.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bouss/asymptotics.hpp"
#include "bouss/waves.hpp"

namespace bouss::cli {

inline constexpr int kSchemaVersion = 1;

enum class DataKind { soliton, gaussian, three_gaussians, perturbed_soliton, samples_file };
enum class ReferenceKind { none, exact_soliton, u_sol, self };

struct InitialDataConfig {
  DataKind kind = DataKind::soliton;
  double A = 0.05;  // soliton and perturbed soliton
  double x0 = 0.0;  // soliton
  std::vector<GaussianTerm> terms{{-0.05, 0.0, 0.02}};
  double a = 0.01, b = 20.0, c = 0.02;  // three gaussians
  std::string path;                     // samples file, relative to the config file
};

struct ReferenceConfig {
  ReferenceKind kind = ReferenceKind::none;
  // u_sol is compared on x in [zeta_min t, zeta_max t], clipped to [-L, L].
  double zeta_min = 1.001;
  double zeta_max = 2.0;
};

struct OutputConfig {
  int grid_points = 4001;  // uniform samples per snapshot file, lower end included
  std::optional<double> x_min;
  std::optional<double> x_max;
  int error_points = 100000;
};

struct ScatteringConfig {
  std::vector<cplx> k;
  bool root_search = true;
  double root_lo = 1.01;
  double root_hi = 3.0;
  double step = 0.05;
  double tolerance = 1e-8;
  int max_refinements = 5;
  bool norming = true;
};

struct AsymptoticsConfig {
  double zeta_from = 0.2;
  double zeta_to = 0.8;
  double zeta_step = 0.01;
  std::optional<cplx> k1;
  std::optional<double> k0;  // skips the root search when given
  double circle_step = 0.05;
  std::vector<double> usol_times;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  SchemeConfig scheme;
  std::vector<double> snapshots;
  double snapshot_every = 0.0;
  InitialDataConfig initial_data;
  ReferenceConfig reference;
  OutputConfig output;
  ScatteringConfig scattering;
  AsymptoticsConfig asymptotics;
  std::filesystem::path base_dir;  // for relative paths, not serialized

  /// Snapshot times in use: the explicit list merged with the cadence, or
  /// t_final alone when both are empty.
  std::vector<double> effective_snapshots() const;
  std::vector<double> zeta_grid() const;
  double x_lo() const { return output.x_min.value_or(-scheme.L); }
  double x_hi() const { return output.x_max.value_or(scheme.L); }
};

/// Parses and validates. Throws ConfigError listing every offending field.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
/// Reads a config file, or the config embedded in a run manifest.
RunConfig load_config(const std::filesystem::path& file);
/// Every effective field, defaults included.
nlohmann::json to_json(const RunConfig& cfg);

/// Initial data selected by the config, on the whole line.
InitialProfile make_profile(const RunConfig& cfg);

const char* to_string(DataKind k);
const char* to_string(ReferenceKind k);

}  // namespace bouss::cli

#pragma once

#include "kdl/analysis.hpp"
#include "kdl/constants.hpp"
#include "kdl/scheme.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kdl {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Parsed and validated experiment description. See README for the keys.
struct RunConfig {
  int schema_version = kSchemaVersion;

  double half_width = 2.0;
  int fine_cells = 8;
  int block_factor = 2;
  double v_max = 4.0;
  int velocity_nodes = 6;

  KernelSpec kernel;
  int n_theta = 2;
  int n_phi = 4;

  GaussianMixture initial;

  double dt = 0.05;
  double T = 1.0;
  StreamingScheme streaming;
  bool moment_fix = false;
  std::vector<double> snapshot_times;
  int snapshot_cap = 64;
  bool all_snapshots = false;
  std::optional<double> guard_R_plus_rho;
  std::optional<double> guard_sigma;

  std::vector<double> taus{1.0};
  double diagnostic_tau = 1.0;

  /// b0 and lambda are copied from the kernel.
  ConstantsInputs constants;

  CampaignSpec campaign;

  std::vector<Resolution> ladder;
  double reference_dt = 0.0;

  GaussianMixture discrepancy_other;
  std::string discrepancy_snapshot;

  std::filesystem::path output_dir = "kdl_out";
  std::uint64_t seed = 1;

  /// Effective value of every key, defaults included, for the manifest.
  std::map<std::string, std::string> echo;

  PhaseSpace phase_space() const;
  CollisionModel model() const;
  SchemeParams scheme_params() const;
};

struct ParseOptions {
  bool allow_unknown_keys = false;
};

/// Parses `key = value` lines ('#' starts a comment). Throws IoError for a
/// missing file and ConfigValidationError listing every violation.
RunConfig parse_config(const std::filesystem::path& path, const ParseOptions& options = {});
RunConfig parse_config_text(const std::string& text, const ParseOptions& options = {});

enum class Subcommand { run, converge, verify, constants, discrepancy };
Subcommand parse_subcommand(const std::string& name);
std::string to_string(Subcommand s);

/// Exit codes of execute().
enum ExitCode : int {
  kExitOk = 0,
  kExitModuleError = 1,
  kExitConfigError = 2,
  kExitIoError = 3,
  kExitVerificationFailed = 4,
};

/// Runs one subcommand and writes its artifacts under config.output_dir.
/// Errors are reported as one JSON object on `err`.
int execute(const RunConfig& config, Subcommand subcommand, std::ostream& err);

/// Structured error line written on failure.
std::string error_json(const std::string& type, const std::string& message,
                       const std::vector<std::string>& violations = {}, std::optional<int> step = std::nullopt);

/// Upper bound on the L1 mass of the analytic mixture outside the box.
double truncation_error_bound(const GaussianMixture& mix, double half_width, double v_max);

}  // namespace kdl

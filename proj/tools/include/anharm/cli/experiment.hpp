#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "anharm/cli/config.hpp"
#include "anharm/report.hpp"

namespace anharm::cli {

/// Exit codes of the `anharm` tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUndetermined = 2;
inline constexpr int kExitUsage = 3;
inline constexpr int kExitComputation = 4;

struct ExperimentResult {
  Kind kind = Kind::spectrum;
  Verdict verdict = Verdict::undetermined;
  std::filesystem::path dir;
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
  /// Set when the experiment stopped on an exception.
  std::optional<std::string> error;
};

struct RunOptions {
  /// Worker threads for report-all; experiments write to separate directories.
  int parallel = 1;
};

struct RunResult {
  Verdict verdict = Verdict::undetermined;
  std::vector<ExperimentResult> experiments;
  std::filesystem::path out_dir;
  std::filesystem::path manifest;
  double wall_time_s = 0.0;

  bool computation_error() const noexcept;
};

/// Runs one experiment kind into `dir`. Exceptions propagate.
ExperimentResult run_experiment(const ExperimentConfig& cfg, Kind kind, const std::filesystem::path& dir);

/// Validates, runs every experiment the kind implies, and writes
/// `manifest.json` into `out_dir`. Exceptions from experiments are recorded
/// in their results, not thrown.
RunResult run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, const RunOptions& opts = {});

int exit_code(const RunResult& r) noexcept;

/// 17 significant digits, the rendering used in every CSV.
std::string format17(double v);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// `out` resolved against ANHARM_DATA_DIR when that is set and `out` is relative.
std::filesystem::path resolve_output_dir(const std::filesystem::path& out);

}  // namespace anharm::cli

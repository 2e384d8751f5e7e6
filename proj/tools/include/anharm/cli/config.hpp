#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "anharm/operator_spec.hpp"

namespace anharm::cli {

enum class Kind {
  check_metric,
  check_symbols,
  spectrum,
  growth,
  schatten_scan,
  phasespace_scan,
  identities,
  report_all,
};

std::string_view to_string(Kind k) noexcept;
std::optional<Kind> parse_kind(std::string_view text) noexcept;
/// Every kind except report-all, in the order report-all runs them.
std::vector<Kind> single_kinds();

/// Invalid configuration. `problems` holds one line per offending key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct OperatorConfig {
  std::optional<std::string> builtin;
  /// Expression pair, used when no builtin is named.
  std::optional<std::string> multiplier;
  std::optional<std::string> potential;
  std::optional<double> gamma;
  std::optional<double> kappa;
  int n = 1;
  std::optional<double> q;

  bool empty() const noexcept { return !builtin && !multiplier && !potential; }
};

struct GridConfig {
  std::optional<double> L;
  /// Points per axis; defaults to 2048 in 1D and 48 in 2D.
  std::optional<int> N;
  /// Trusted eigenvalues wanted when L is chosen automatically; defaults to
  /// 150 in 1D and 40 in 2D.
  std::optional<std::size_t> target;
};

struct MetricConfig {
  std::uint64_t trials = 100000;
  int doublings = 3;
  std::optional<int> n_max;
};

struct SymbolsConfig {
  std::uint64_t samples = 2000;
  int max_order = 3;
  double m = 1.0;
  double R = 1.0;
};

struct SpectrumConfig {
  std::optional<std::size_t> j_min;
  std::optional<std::size_t> j_max;
};

struct GrowthConfig {
  /// Defaults to 2 / predicted exponent.
  std::optional<double> r;
  std::vector<double> L_list{1.0, 2.0, 5.0, 10.0};
};

struct SchattenConfig {
  std::vector<double> r_list{1.0, 2.0, 3.0};
  /// nu values as multiples of mu0 / r.
  std::vector<double> nu_factors{0.5, 0.9, 1.1, 2.0};
};

struct PhasespaceConfig {
  /// Offsets from mu0 as fractions of mu0.
  std::vector<double> mu_offsets{-0.2, -0.05, 0.05, 0.3};
  /// Explicit mu values; override mu_offsets when set.
  std::vector<double> mu_list;
  std::vector<double> radii;
};

struct IdentitiesConfig {
  std::string symbol = "exp(-(x^2 + xi^2))";
  double L = 8.0;
  int N = 256;
  std::vector<double> t_list{0.0, 0.5, 1.0};
};

struct ExperimentConfig {
  std::optional<Kind> kind;
  std::uint64_t seed = 1;
  std::filesystem::path out = "anharm-out";
  OperatorConfig op;
  GridConfig grid;
  MetricConfig metric;
  SymbolsConfig symbols;
  SpectrumConfig spectrum;
  GrowthConfig growth;
  SchattenConfig schatten;
  PhasespaceConfig phasespace;
  IdentitiesConfig identities;
};

/// Parses INI text. Empty input, unknown sections or keys and malformed
/// values are all collected into one ConfigError. Required entries are
/// checked by validate, after command-line overrides.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks that the config is runnable; throws ConfigError otherwise.
void validate(const ExperimentConfig& cfg);

/// Builds the operator pair. Throws ConfigError on bad expressions.
OperatorSpec make_operator(const ExperimentConfig& cfg);

/// Canonical form of the effective configuration, hashed into the manifest.
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace anharm::cli

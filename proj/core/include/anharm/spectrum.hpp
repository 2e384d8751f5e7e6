#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "anharm/quantize.hpp"
#include "anharm/report.hpp"

namespace anharm {

/// Ascending eigenvalues with the count of trusted ones (those at or below
/// the matrix trust energy).
struct Spectrum {
  std::vector<double> values;
  std::size_t trust_cutoff = 0;
  double trust_energy = std::numeric_limits<double>::infinity();
  Grid1D grid{1.0, 2};
  int dim = 1;
  std::string provenance;

  std::span<const double> trusted() const { return {values.data(), trust_cutoff}; }
  /// 1-based: lambda(1) is the smallest eigenvalue.
  double lambda(std::size_t j) const;
};

struct EigensolveOptions {
  /// Check ||Mv - lambda v|| <= 1e-8 ||M|| on `residual_checks` random pairs.
  bool verify_residuals = true;
  int residual_checks = 10;
  std::uint64_t seed = 7;
  /// Relative Frobenius size of M - M* above which input is rejected.
  double hermitian_tol = 1e-10;
};

/// Throws NotHermitianError, or ConvergenceError when a residual check fails.
Spectrum eigensolve(const OperatorMatrix& M, const EigensolveOptions& opts = {});

/// #{trusted j : lambda_j < lambda}. Throws OutOfTrustError past the trust energy.
std::size_t counting(const Spectrum& s, double lambda);
/// #{j : lambda_j < lambda} over every computed eigenvalue.
std::size_t counting_all(const Spectrum& s, double lambda);

struct GrowthFit {
  double alpha = 0.0;
  double r2 = 0.0;
  double log_c = 0.0;
  std::size_t j_min = 0;
  std::size_t j_max = 0;
};

/// Least-squares slope of log lambda_j against log j, j 1-based, inclusive.
/// Throws FitError on nonpositive eigenvalues or a window narrower than 30.
GrowthFit fit_growth_exponent(const Spectrum& s, std::size_t j_min, std::size_t j_max);
/// Window [20, min(150, trust_cutoff)].
GrowthFit fit_growth_exponent(const Spectrum& s);

/// 2 kappa gamma / (n (kappa + gamma)).
double predicted_exponent(int n, double kappa, double gamma);

/// Eigenvalue accuracy granted to growth_bound_start: lambda_j counts as
/// lambda_j + kGrowthSlack max(1, |lambda_j|), so exact equalities survive
/// round-off.
inline constexpr double kGrowthSlack = 1e-8;

/// Smallest L0 with L j^(1/r) <= lambda_j for all trusted j >= L0; nullopt
/// when the inequality still fails at the top of the trust window.
std::optional<std::size_t> growth_bound_start(const Spectrum& s, double r, double L);

/// Per-L results of growth_bound_start. Constants `L0[L=..]`; FAIL if any L
/// has no start inside the trust window.
CheckReport certify_growth_bound(const Spectrum& s, double r, std::span<const double> L_list);

/// Half-width L for an N-point grid whose trust window holds about `target`
/// eigenvalues: the geometric mean of the smallest L with V(L) >= 2E and the
/// largest with A(pi N / 2L) >= 2E, E the energy where the classical count
/// reaches 1.2 target. Throws DomainTooSmallError when no such L exists.
Grid1D suggest_grid(const OperatorSpec& spec, int N, std::size_t target);

/// Columns j, lambda_j, trusted.
void write_spectrum_csv(const Spectrum& s, const std::filesystem::path& path);
nlohmann::json to_json(const Spectrum& s);

}  // namespace anharm

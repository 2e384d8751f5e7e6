#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "anharm/operator_spec.hpp"
#include "anharm/report.hpp"

namespace anharm {

// Phase points and tangents are spans of length 2n: position first, then
// frequency.

/// g_X(T) = |t|^2 / M^(1/kappa) + |tau|^2 / M^(1/gamma).
double metric_at(const OperatorSpec& spec, std::span<const double> X, std::span<const double> T);

/// g^sigma_X(T) = M^(1/gamma) |t|^2 + M^(1/kappa) |tau|^2.
double dual_metric_at(const OperatorSpec& spec, std::span<const double> X,
                      std::span<const double> T);

/// lambda_g(X) = M^((kappa + gamma) / (2 kappa gamma)).
double uncertainty_param(const OperatorSpec& spec, std::span<const double> X);

using WeightFn = std::function<double(std::span<const double> x, std::span<const double> xi)>;

struct MetricOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  int doublings = 3;
  /// Base points have log-uniform radius in [1e-3, radius].
  double radius = 1e3;
  /// Largest constant scanned is 2^max_log2_constant.
  int max_log2_constant = 20;
};

/// Weight ratio (M_X / M_Y)^(+-1) <= C whenever g_X(X - Y) <= 1/C, for C on
/// the grid 2^0..2^20. Constants: `C`, `max_ratio`, `accepted`.
CheckReport check_slowness(const OperatorSpec& spec, const MetricOptions& opts = {});

/// (g_X / g_Y)^(+-1) <= Cbar (1 + g^sigma_Y(X - Y))^J for J <= n_max.
/// Constants: `C_bar`, `J`, `sup`.
CheckReport check_temperateness(const OperatorSpec& spec, int n_max, const MetricOptions& opts = {});
/// n_max = max(4, ceil(2 gamma)).
CheckReport check_temperateness(const OperatorSpec& spec, const MetricOptions& opts = {});

/// lambda_g(X) >= 1 at every sample. Constants: `min_lambda`.
CheckReport check_uncertainty(const OperatorSpec& spec, const MetricOptions& opts = {});

struct GWeightReport {
  CheckReport continuity;
  CheckReport temperateness;
  Verdict verdict = Verdict::undetermined;
};

/// g-continuity and g-temperateness of `weight` (M = q + V + A when empty).
/// Constants: continuity `C_tilde`; temperateness `C_tilde`, `N`.
GWeightReport check_gweight(const OperatorSpec& spec, const MetricOptions& opts = {},
                            const WeightFn& weight = {}, int n_max = 4);

}  // namespace anharm

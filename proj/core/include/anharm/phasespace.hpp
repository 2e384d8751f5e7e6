#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "anharm/operator_spec.hpp"

namespace anharm {

/// mu0 = n (kappa + gamma) / (2 kappa gamma).
double threshold_mu0(int n, double kappa, double gamma);

enum class IntegralVerdict { convergent, divergent, undetermined };

std::string_view to_string(IntegralVerdict v) noexcept;

struct IntegralResult {
  /// Last partial plus the extrapolated tail; +inf when divergent.
  double value = 0.0;
  std::vector<double> radii;
  std::vector<double> partials;
  /// Log-log slope of the shell densities, one per consecutive shell pair.
  std::vector<double> slopes;
  double tail_slope = 0.0;
  IntegralVerdict verdict = IntegralVerdict::undetermined;
  double abs_error = 0.0;
};

struct QuadratureOptions {
  /// Adaptive Gauss-Kronrod when true; composite Gauss-Legendre on fixed
  /// panels (nodes shared across mu) when false.
  bool adaptive = true;
  double tol = 1e-9;
  /// Integrate over the whole (x, xi) plane instead of the positive orthant.
  bool full_domain = false;
  int angle_panels = 64;
  int radius_panels = 16;
  /// Slopes below -threshold are convergent, above +threshold divergent.
  double slope_threshold = 0.02;
};

/// 8, 16, ..., 1024.
std::vector<double> default_radii();

/// Partial integrals of (q + V + A)^(-mu) over the balls |(x, xi)| <= R and a
/// convergence verdict from the tail slope. A and V must be radial (any n) or
/// n must be 1.
IntegralResult integral_Imu(const OperatorSpec& spec, double mu,
                            std::span<const double> radii = {}, const QuadratureOptions& opts = {});

std::vector<std::pair<double, IntegralResult>> scan_threshold(const OperatorSpec& spec,
                                                              std::span<const double> mu_grid,
                                                              std::span<const double> radii = {},
                                                              const QuadratureOptions& opts = {});

/// Volume of {(x, xi) : A(xi) + V(x) < lambda} in R^(2n).
double classical_volume(const OperatorSpec& spec, double lambda);

}  // namespace anharm

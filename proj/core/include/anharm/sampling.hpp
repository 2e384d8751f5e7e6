#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "anharm/report.hpp"

namespace anharm {

using Rng = std::mt19937_64;

/// Sample-doubling plan shared by every sampled checker.
///
/// Samples are drawn as one stream split into tiers: tier 0 holds the first
/// `base` samples, tier k >= 1 holds samples [base*2^(k-1), base*2^k). Prefix k
/// (tiers 0..k) is the k-th doubling, so sup estimates are nested. When
/// `grow_radius` is set, tier k draws radii up to `radius * 2^k`, which lets
/// asymptotic divergence show up as growth between doublings.
struct DoublingPlan {
  std::uint64_t base = 1000;
  int doublings = 3;
  double radius = 1e3;
  double min_radius = 1e-3;
  bool grow_radius = true;

  std::uint64_t total() const noexcept { return base << doublings; }
  int tier_of(std::uint64_t index) const noexcept;
  double radius_cap(int tier) const noexcept;
  std::uint64_t prefix_size(int k) const noexcept { return base << k; }
};

/// Uniform direction on the unit sphere of R^dim, written into `out`.
void random_direction(Rng& rng, std::span<double> out);

double log_uniform(Rng& rng, double lo, double hi);

/// Point with log-uniform radius in [r_min, r_max] and uniform direction.
void log_radial_point(Rng& rng, double r_min, double r_max, std::span<double> out);

/// Uniform point in the unit ball of R^dim.
void unit_ball_point(Rng& rng, std::span<double> out);

/// Verdict from a sequence of sup estimates taken after successive doublings.
///
/// FAIL when any estimate is non-finite or every doubling grows the estimate
/// by more than `max_growth`; PASS when no doubling does; UNDETERMINED
/// otherwise. With `decreasing`, the estimates are infima and growth means
/// shrinking by the same factor.
Verdict doubling_verdict(std::span<const double> history, double max_growth = 1.25,
                         bool decreasing = false);

}  // namespace anharm

#include "anharm/sampling.hpp"

#include <cmath>

namespace anharm {

int DoublingPlan::tier_of(std::uint64_t index) const noexcept {
  int tier = 0;
  while (tier < doublings && index >= (base << tier)) ++tier;
  return tier;
}

double DoublingPlan::radius_cap(int tier) const noexcept {
  return grow_radius ? std::ldexp(radius, tier) : radius;
}

void random_direction(Rng& rng, std::span<double> out) {
  std::normal_distribution<double> normal;
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : out) {
      v = normal(rng);
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : out) v *= inv;
}

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

void log_radial_point(Rng& rng, double r_min, double r_max, std::span<double> out) {
  random_direction(rng, out);
  const double r = log_uniform(rng, r_min, r_max);
  for (double& v : out) v *= r;
}

void unit_ball_point(Rng& rng, std::span<double> out) {
  random_direction(rng, out);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = std::pow(u(rng), 1.0 / static_cast<double>(out.size()));
  for (double& v : out) v *= r;
}

Verdict doubling_verdict(std::span<const double> history, double max_growth, bool decreasing) {
  if (history.empty()) return Verdict::undetermined;
  for (double h : history) {
    if (!std::isfinite(h)) return Verdict::fail;
  }
  if (history.size() == 1) return Verdict::pass;
  int grew = 0;
  for (std::size_t k = 1; k < history.size(); ++k) {
    const double prev = history[k - 1];
    const double cur = history[k];
    const bool growth = decreasing ? (cur * max_growth < prev) : (cur > max_growth * prev);
    if (growth) ++grew;
  }
  if (grew == 0) return Verdict::pass;
  if (grew == static_cast<int>(history.size()) - 1) return Verdict::fail;
  return Verdict::undetermined;
}

}  // namespace anharm

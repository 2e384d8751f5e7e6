#include "anharm/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "anharm/errors.hpp"

namespace anharm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

// Surface area of the unit sphere in R^n.
double sphere_area(int n) {
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

struct Polar {
  const OperatorSpec& spec;
  double mu;
  bool orthant;
  double factor;
  int n;

  double operator()(double rho, double theta) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double M;
    double w;
    if (orthant) {
      M = spec.q() + spec.V().radial(rho * c) + spec.A().radial(rho * s);
      w = factor * std::pow(rho, 2 * n - 1) * std::pow(c * s, n - 1);
    } else {
      const double x = rho * c;
      const double xi = rho * s;
      M = spec.q() + spec.V().raw(std::span<const double>(&x, 1)) + spec.A().raw(std::span<const double>(&xi, 1));
      w = rho;
    }
    const double v = w * std::pow(M, -mu);
    if (!std::isfinite(v)) {
      throw QuadratureError("integral_Imu: non-finite integrand at rho=" + std::to_string(rho) +
                            ", theta=" + std::to_string(theta));
    }
    return v;
  }
};

struct Cell {
  double value;
  double error;
};

Cell integrate_shell(const Polar& f, double r0, double r1, const QuadratureOptions& opts) {
  std::vector<std::pair<double, double>> arcs;
  if (f.orthant) {
    arcs = {{0.0, 0.5 * kPi}};
  } else {
    for (int k = 0; k < 4; ++k) arcs.emplace_back(0.5 * kPi * k, 0.5 * kPi * (k + 1));
  }
  if (opts.adaptive) {
    auto inner = [&](double rho) {
      double s = 0.0;
      for (const auto& [a, b] : arcs) {
        s += gauss_kronrod<double, 15>::integrate([&](double th) { return f(rho, th); }, a, b, 15, opts.tol);
      }
      return s;
    };
    double err = 0.0;
    const double v = gauss_kronrod<double, 15>::integrate(inner, r0, r1, 15, opts.tol, &err);
    return {v, err};
  }
  const int pa = std::max(1, opts.angle_panels / static_cast<int>(arcs.size()));
  auto inner = [&](double rho) {
    double s = 0.0;
    for (const auto& [a, b] : arcs) {
      const double h = (b - a) / pa;
      for (int p = 0; p < pa; ++p) {
        s += gauss<double, 20>::integrate([&](double th) { return f(rho, th); }, a + p * h, a + (p + 1) * h);
      }
    }
    return s;
  };
  double v = 0.0;
  const double h = (r1 - r0) / opts.radius_panels;
  for (int p = 0; p < opts.radius_panels; ++p) {
    v += gauss<double, 20>::integrate(inner, r0 + p * h, r0 + (p + 1) * h);
  }
  return {v, 0.0};
}

// {xi in [-X, X] : A(xi) < level}, measured by a scan plus bisection.
double sublevel_measure_1d(const TauFunction& A, double level, double X) {
  constexpr int kScan = 4096;
  auto f = [&](double t) { return A.raw(std::span<const double>(&t, 1)) - level; };
  double measure = 0.0;
  double a = -X;
  double fa = f(a);
  double run_start = fa < 0.0 ? a : kInf;
  for (int i = 1; i <= kScan; ++i) {
    const double b = -X + 2.0 * X * i / kScan;
    const double fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double lo = a, hi = b;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (lo + hi);
        if ((f(m) < 0.0) == (fa < 0.0)) {
          lo = m;
        } else {
          hi = m;
        }
      }
      const double cross = 0.5 * (lo + hi);
      if (fa < 0.0) {
        measure += cross - run_start;
        run_start = kInf;
      } else {
        run_start = cross;
      }
    }
    a = b;
    fa = fb;
  }
  if (run_start != kInf) measure += X - run_start;
  return measure;
}

}  // namespace

double threshold_mu0(int n, double kappa, double gamma) {
  if (!(kappa > 0.0) || !(gamma > 0.0) || n < 1) throw std::invalid_argument("threshold_mu0: bad arguments");
  return n * (kappa + gamma) / (2.0 * kappa * gamma);
}

std::string_view to_string(IntegralVerdict v) noexcept {
  switch (v) {
    case IntegralVerdict::convergent: return "convergent";
    case IntegralVerdict::divergent: return "divergent";
    case IntegralVerdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

std::vector<double> default_radii() {
  std::vector<double> r;
  for (int k = 3; k <= 10; ++k) r.push_back(std::ldexp(1.0, k));
  return r;
}

IntegralResult integral_Imu(const OperatorSpec& spec, double mu, std::span<const double> radii_in,
                            const QuadratureOptions& opts) {
  if (!(mu > 0.0)) throw std::invalid_argument("integral_Imu: mu must be positive");
  const std::vector<double> radii = radii_in.empty() ? default_radii()
                                                     : std::vector<double>(radii_in.begin(), radii_in.end());
  if (radii.size() < 3) throw std::invalid_argument("integral_Imu: need at least 3 radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > (i ? radii[i - 1] : 0.0))) throw std::invalid_argument("integral_Imu: radii must increase");
  }
  const int n = spec.n();
  const bool radial = spec.A().is_radial() && spec.V().is_radial();
  if (n > 1 && (!radial || opts.full_domain)) {
    throw std::invalid_argument("integral_Imu: n > 1 needs radial A and V on the orthant");
  }
  const bool orthant = radial && !opts.full_domain;
  const double w = sphere_area(n);
  const Polar f{spec, mu, orthant, w * w, n};

  IntegralResult out;
  out.radii = radii;
  std::vector<double> shells;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const Cell c = integrate_shell(f, k ? radii[k - 1] : 0.0, radii[k], opts);
    if (!std::isfinite(c.value)) throw QuadratureError("integral_Imu: shell " + std::to_string(k) + " is not finite");
    shells.push_back(c.value);
    total += c.value;
    err += c.error;
    out.partials.push_back(total);
  }

  // Shell densities per unit log-radius, compared between shell midpoints.
  for (std::size_t k = 2; k < radii.size(); ++k) {
    const double d1 = shells[k - 1] / std::log(radii[k - 1] / radii[k - 2]);
    const double d2 = shells[k] / std::log(radii[k] / radii[k - 1]);
    const double g1 = std::sqrt(radii[k - 1] * radii[k - 2]);
    const double g2 = std::sqrt(radii[k] * radii[k - 1]);
    out.slopes.push_back(d1 > 0.0 && d2 > 0.0 ? std::log(d2 / d1) / std::log(g2 / g1) : 0.0);
  }
  out.tail_slope = out.slopes.back();
  out.abs_error = err;

  if (shells.back() == 0.0) {
    out.verdict = IntegralVerdict::convergent;
    out.value = total;
  } else if (out.tail_slope < -opts.slope_threshold) {
    out.verdict = IntegralVerdict::convergent;
    const double ratio = std::pow(radii.back() / radii[radii.size() - 2], out.tail_slope);
    const double tail = shells.back() * ratio / (1.0 - ratio);
    out.value = total + tail;
    out.abs_error += 0.1 * tail;
  } else if (out.tail_slope > opts.slope_threshold) {
    out.verdict = IntegralVerdict::divergent;
    out.value = kInf;
  } else {
    out.verdict = IntegralVerdict::undetermined;
    out.value = total;
  }
  return out;
}

std::vector<std::pair<double, IntegralResult>> scan_threshold(const OperatorSpec& spec,
                                                              std::span<const double> mu_grid,
                                                              std::span<const double> radii,
                                                              const QuadratureOptions& opts) {
  std::vector<std::pair<double, IntegralResult>> out;
  out.reserve(mu_grid.size());
  for (double mu : mu_grid) out.emplace_back(mu, integral_Imu(spec, mu, radii, opts));
  return out;
}

double classical_volume(const OperatorSpec& spec, double lambda) {
  const TauFunction& A = spec.A();
  const TauFunction& V = spec.V();
  const int n = spec.n();
  const double amin = A.is_builtin() ? A.radial(0.0) : coarse_minimum(A);
  const double vmin = V.is_builtin() ? V.radial(0.0) : coarse_minimum(V);
  if (!(lambda > amin + vmin)) return 0.0;

  if (A.is_builtin() && V.is_builtin()) {
    const double xt = *V.radial_inverse(lambda - amin);
    const double w = sphere_area(n);
    // x-shell measure times the volume of the xi-ball below lambda - V.
    auto slice = [&](double r) {
      const double rho = *A.radial_inverse(lambda - V.radial(r));
      return w * std::pow(r, n - 1) * w * std::pow(rho, n) / n;
    };
    if (!std::isfinite(xt)) throw std::invalid_argument("classical_volume: unbounded sublevel set");
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(slice, 0.0, xt, 1e-12);
  }
  if (n != 1) throw std::invalid_argument("classical_volume: n > 1 needs builtin A and V");

  const double scale = std::max(1.0, lambda);
  const double X = 1.5 * std::pow(scale, 0.5 / V.tau());
  const double Xi = 1.5 * std::pow(scale, 0.5 / A.tau());
  auto slice = [&](double x) {
    const double level = lambda - V.raw(std::span<const double>(&x, 1));
    if (!(level > amin)) return 0.0;
    return sublevel_measure_1d(A, level, Xi);
  };
  return gauss_kronrod<double, 15>::integrate(slice, -X, X, 20, 1e-8);
}

}  // namespace anharm

// Acceptance runner. `anharm_acceptance` runs every criterion,
// `anharm_acceptance N` runs criterion N only. One PASS/FAIL line each;
// exit status 1 when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "anharm/catalog.hpp"
#include "anharm/metric.hpp"
#include "anharm/phasespace.hpp"
#include "anharm/quantize.hpp"
#include "anharm/schatten.hpp"
#include "anharm/spectrum.hpp"
#include "anharm/symbols.hpp"

namespace {

using namespace anharm;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] ";
    }
    detail << what << "; ";
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Spectrum spectrum_for(const OperatorSpec& spec, const Grid1D& g) { return eigensolve(assemble_split(spec, g)); }

Spectrum auto_spectrum(const OperatorSpec& spec) { return spectrum_for(spec, suggest_grid(spec, 2048, 150)); }

void harmonic_ground_truth(Outcome& o) {
  const auto t0 = Clock::now();
  const Spectrum s = spectrum_for(make_builtin("harmonic-1d"), Grid1D(12.0, 512));
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t j = 0; j < 30; ++j) worst = std::max(worst, std::abs(s.values[j] - (2.0 * j + 1.0)));
  o.require(worst <= 1e-8, "max |lambda_j - (2j+1)| over 30 = " + fmt(worst) + " (tol 1e-8)");
  o.require(elapsed < 10.0, "runtime " + fmt(elapsed) + " s (< 10)");
}

void growth_exponents(Outcome& o) {
  for (const char* name : {"harmonic-1d", "quartic-1d", "sixth-1d", "frac-rel-1d"}) {
    const auto spec = make_builtin(name);
    const auto t0 = Clock::now();
    const Spectrum s = auto_spectrum(spec);
    const GrowthFit fit = fit_growth_exponent(s, 20, 150);
    const double elapsed = seconds_since(t0);
    const double want = predicted_exponent(1, spec.kappa(), spec.gamma());
    o.require(std::abs(fit.alpha - want) <= 0.05,
              std::string(name) + " alpha " + fmt(fit.alpha) + " vs " + fmt(want) + " (tol 0.05)");
    o.require(elapsed < 120.0, std::string(name) + " runtime " + fmt(elapsed) + " s");
  }
}

void growth_lower_bound(Outcome& o) {
  const Spectrum s = spectrum_for(make_builtin("harmonic-1d"), Grid1D(12.0, 512));
  const std::vector<double> Ls{10.0};
  const CheckReport rep = certify_growth_bound(s, 2.0, Ls);
  const auto it = rep.constants.find("L0[L=10]");
  const bool found = it != rep.constants.end();
  o.require(found && it->second == 23.0, "L0 at r=2, L=10 is " + (found ? fmt(it->second) : "none") + " (want 23)");
}

void phasespace_threshold(Outcome& o) {
  const std::vector<double> offsets{-0.3, -0.15, -0.05, 0.05, 0.15, 0.3};
  for (const char* name : {"harmonic-1d", "quartic-1d", "frac-rel-1d"}) {
    const auto spec = make_builtin(name);
    const double mu0 = threshold_mu0(1, spec.kappa(), spec.gamma());
    std::vector<double> mus;
    for (double d : offsets) mus.push_back(mu0 + d);
    bool flips = true;
    for (const auto& [mu, r] : scan_threshold(spec, mus)) {
      const auto want = mu > mu0 ? IntegralVerdict::convergent : IntegralVerdict::divergent;
      flips &= r.verdict == want;
    }
    o.require(flips, std::string(name) + " flips at mu0 = " + fmt(mu0) + " within 0.05");
  }
  const double i2 = integral_Imu(make_builtin("harmonic-1d", {2.0}), 2.0).value;
  const double half_pi = std::numbers::pi / 2.0;
  o.require(std::abs(i2 - half_pi) <= 0.01 * half_pi, "I_2 harmonic q=2 = " + fmt(i2) + " (pi/2 within 1%)");
}

void schatten_agreement(Outcome& o) {
  for (const char* name : {"harmonic-1d", "quartic-1d"}) {
    const auto spec = make_builtin(name);
    const Spectrum s = auto_spectrum(spec);
    const double mu0 = threshold_mu0(1, spec.kappa(), spec.gamma());
    int compared = 0, boundary = 0, bad = 0;
    for (double r : {1.0, 2.0, 3.0}) {
      for (double f : {0.5, 0.9, 1.1, 2.0}) {
        const MembershipResult m = classify_membership(spec, r, f * mu0 / r, s);
        if (m.verdict == Membership::boundary) {
          ++boundary;
          continue;
        }
        ++compared;
        if (m.verdict == Membership::undetermined || !m.agrees) ++bad;
      }
    }
    o.require(bad == 0, std::string(name) + " " + std::to_string(compared - bad) + "/" + std::to_string(compared) +
                            " agree, " + std::to_string(boundary) + " boundary");
  }
  const auto spec = make_builtin("harmonic-1d", {1.0});
  const Spectrum s = auto_spectrum(spec);
  const auto res = schatten_norm(SingularValueSeries::from_spectrum(s, spec.q(), 1.0), 2.0, SchattenMode::continued);
  const double want = std::numbers::pi * std::numbers::pi / 24.0;
  o.require(std::abs(res.power_sum - want) <= 0.01 * want,
            "continued sum s_k^2 = " + fmt(res.power_sum) + " (pi^2/24 within 1%)");
}

void trace_identities(Outcome& o) {
  const PhaseSymbol a = PhaseSymbol::from_expression(Expression::parse("exp(-(x^2 + xi^2))"), 1, 0.0);
  const Grid1D g(8.0, 256);
  const auto tr = trace_identity_check(a, g, 0.5);
  const auto hs = hs_identity_check(a, g, 0.5);
  o.require(std::abs(tr.lhs - 0.5) <= 1e-3, "trace t=1/2 " + fmt(tr.lhs) + " (0.5 within 1e-3)");
  o.require(std::abs(hs.lhs - 0.5) <= 1e-3, "HS t=1/2 " + fmt(hs.lhs) + " (0.5 within 1e-3)");
  for (double t : {0.0, 1.0}) {
    const auto r = trace_identity_check(a, g, t);
    o.detail << "recorded trace t=" << t << " " << fmt(r.lhs) << " vs " << fmt(r.rhs) << "; ";
  }
}

void split_invariance(Outcome& o) {
  for (const auto& b : list_builtins()) {
    const auto spec = make_builtin(b.name);
    const Grid1D g = b.n == 2 ? Grid1D(4.0, 16) : Grid1D(8.0, 128);
    const ComplexMatrix ref = assemble_split(spec, g).data;
    const PhaseSymbol a = PhaseSymbol::split(spec.A(), spec.V());
    double worst = 0.0;
    for (double t : {0.0, 0.5, 1.0}) {
      const ComplexMatrix Q = quantize_t(a, t, g).data;
      worst = std::max(worst, (Q - ref).norm() / ref.norm());
    }
    o.require(worst <= 1e-10, b.name + " rel Frobenius " + fmt(worst) + " (tol 1e-10)");
  }
}

bool finite_constants(const CheckReport& r) {
  return std::all_of(r.constants.begin(), r.constants.end(), [](const auto& kv) { return std::isfinite(kv.second); });
}

void metric_suite(Outcome& o) {
  MetricOptions opts;
  opts.trials = 100000;
  opts.doublings = 3;
  for (const char* name : {"harmonic-1d", "quartic-1d", "frac-rel-1d"}) {
    const auto spec = make_builtin(name);
    const auto slow = check_slowness(spec, opts);
    const auto temp = check_temperateness(spec, opts);
    const auto gw = check_gweight(spec, opts);
    o.require(slow.passed() && finite_constants(slow), std::string(name) + " slowness " + std::string(to_string(slow.verdict)));
    o.require(temp.passed() && finite_constants(temp),
              std::string(name) + " temperateness " + std::string(to_string(temp.verdict)));
    o.require(gw.verdict == Verdict::pass && finite_constants(gw.continuity) && finite_constants(gw.temperateness),
              std::string(name) + " g-weight " + std::string(to_string(gw.verdict)));
  }
  const OperatorSpec adv(TauFunction::even_power(1.0), TauFunction::expression(Expression::parse("exp(x^2)"), 1.0));
  const auto slow = check_slowness(adv, opts);
  o.require(slow.verdict == Verdict::fail, "(xi^2, e^{x^2}) slowness " + std::string(to_string(slow.verdict)));
}

void symbol_class(Outcome& o) {
  SigmaOptions so;
  so.max_order = 3;
  so.sample_count = 10000;
  for (const auto& b : list_builtins()) {
    const auto spec = make_builtin(b.name);
    so.q = spec.q();
    const auto rep = check_sigma_membership(PhaseSymbol::split(spec.A(), spec.V()), spec.A(), spec.V(), 1.0, so);
    std::string why;
    if (!rep.passed() && !rep.notes.empty()) why = " (" + rep.notes.front() + ")";
    o.require(rep.passed(), b.name + " m=1 " + std::string(to_string(rep.verdict)) + why);
  }
  const auto h = make_builtin("harmonic-1d");
  so.q = h.q();
  const auto rep = check_sigma_membership(PhaseSymbol::split(h.A(), h.V()), h.A(), h.V(), 0.5, so);
  o.require(rep.verdict == Verdict::fail, "harmonic-1d m=0.5 " + std::string(to_string(rep.verdict)));
}

void counting_bound(Outcome& o) {
  for (const char* name : {"harmonic-1d", "quartic-1d"}) {
    const auto spec = make_builtin(name);
    const Spectrum s = auto_spectrum(spec);
    const double mu0 = threshold_mu0(1, spec.kappa(), spec.gamma());
    const double top = s.lambda(s.trust_cutoff);
    double lo = INFINITY, hi = 0.0;
    for (int k = 0; k <= 40; ++k) {
      const double lambda = top * (0.5 + 0.5 * k / 40.0);
      const double c = counting(s, lambda) / std::pow(lambda, mu0);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    o.require(hi / lo - 1.0 < 0.15, std::string(name) + " variation " + fmt(hi / lo - 1.0) + " (< 0.15)");
  }
  const auto spec = make_builtin("harmonic-1d");
  const Spectrum s = spectrum_for(spec, Grid1D(18.0, 2048));
  for (double lambda : {100.0, 200.0, 400.0}) {
    const double ratio = counting_all(s, lambda) * 2.0 * std::numbers::pi / classical_volume(spec, lambda);
    o.require(ratio >= 0.85 && ratio <= 1.15, "Weyl ratio at " + fmt(lambda) + " = " + fmt(ratio));
  }
}

void uncertainty_identity(Outcome& o) {
  std::mt19937_64 rng(11);
  for (const auto& b : list_builtins()) {
    const auto spec = make_builtin(b.name);
    const int n = spec.n();
    const double p = 2.0 * spec.kappa() * spec.gamma() / (spec.kappa() + spec.gamma());
    std::uniform_real_distribution<double> expo(-3.0, 3.0);
    std::bernoulli_distribution sign(0.5);
    std::vector<double> X(2 * n);
    double worst = 0.0;
    for (int i = 0; i < 1000000; ++i) {
      for (auto& c : X) c = (sign(rng) ? 1.0 : -1.0) * std::pow(10.0, expo(rng));
      const double lhs = std::pow(uncertainty_param(spec, X), p);
      const double M = spec.weight(std::span<const double>(X.data(), n), std::span<const double>(X.data() + n, n));
      worst = std::max(worst, std::abs(lhs - M) / M);
    }
    o.require(worst <= 1e-12, b.name + " max rel " + fmt(worst) + " (tol 1e-12)");
  }
}

struct Criterion {
  const char* title;
  std::function<void(Outcome&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {"harmonic ground truth", harmonic_ground_truth},
      {"growth exponents", growth_exponents},
      {"growth lower bound", growth_lower_bound},
      {"phase-space threshold", phasespace_threshold},
      {"Schatten membership", schatten_agreement},
      {"trace and HS identities", trace_identities},
      {"split quantization invariance", split_invariance},
      {"metric axioms", metric_suite},
      {"symbol classes", symbol_class},
      {"counting bound", counting_bound},
      {"uncertainty identity", uncertainty_identity},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const auto& all = criteria();
  std::vector<std::size_t> selected;
  if (argc > 1) {
    const int k = std::atoi(argv[1]);
    if (k < 1 || k > static_cast<int>(all.size())) {
      std::fprintf(stderr, "usage: %s [1..%zu]\n", argv[0], all.size());
      return 3;
    }
    selected.push_back(static_cast<std::size_t>(k - 1));
  } else {
    for (std::size_t i = 0; i < all.size(); ++i) selected.push_back(i);
  }

  bool ok = true;
  for (std::size_t i : selected) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      all[i].run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    ok &= o.pass;
    std::printf("criterion %zu %s: %s  [%.1f s] %s\n", i + 1, all[i].title, o.pass ? "PASS" : "FAIL",
                seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}

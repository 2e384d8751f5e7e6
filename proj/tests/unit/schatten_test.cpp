#include "anharm/schatten.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "anharm/catalog.hpp"
#include "anharm/errors.hpp"
#include "anharm/phasespace.hpp"
#include "support/generators.hpp"

namespace anharm {
namespace {

using testing::Rng;

const Spectrum& harmonic_spectrum() {
  static const Spectrum s = [] {
    const auto spec = make_builtin("harmonic-1d");
    return eigensolve(assemble_split(spec, suggest_grid(spec, 1024, 150)));
  }();
  return s;
}

const Spectrum& quartic_spectrum() {
  static const Spectrum s = [] {
    const auto spec = make_builtin("quartic-1d");
    return eigensolve(assemble_split(spec, suggest_grid(spec, 1024, 150)));
  }();
  return s;
}

PhaseSymbol gaussian(double scale) {
  PhaseSymbol a;
  a.fn = [scale](std::span<const double> x, std::span<const double> xi) {
    return std::complex<double>(std::exp(-(x[0] * x[0] + xi[0] * xi[0]) / scale));
  };
  return a;
}

std::vector<double> eigenvalues(const ComplexMatrix& M) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

// ---------------------------------------------------------------------------
// negative powers
// ---------------------------------------------------------------------------

TEST(NegativePower, ZeroIsIdentity) {
  const auto M = assemble_split(make_builtin("harmonic-1d"), Grid1D(8.0, 64));
  const auto P = negative_power(M, 1.0, 0.0);
  EXPECT_LE((P.data - ComplexMatrix::Identity(64, 64)).norm(), 1e-12);
}

TEST(NegativePower, HarmonicInverse) {
  const auto M = assemble_split(make_builtin("harmonic-1d"), Grid1D(12.0, 512));
  auto ev = eigenvalues(negative_power(M, 1.0, 1.0).data);
  std::sort(ev.rbegin(), ev.rend());
  for (int j = 0; j < 20; ++j) EXPECT_NEAR(ev[j], 1.0 / (2.0 * j + 2.0), 1e-9) << j;
}

TEST(NegativePower, DiagonalIsEntrywise) {
  const OperatorSpec spec(TauFunction::zero(1.0), TauFunction::even_power(1.0), 1.0);
  const Grid1D g(3.0, 32);
  const auto P = negative_power(assemble_split(spec, g), 1.0, 2.0);
  for (int j = 0; j < 32; ++j) {
    EXPECT_NEAR(P.data(j, j).real(), std::pow(1.0 + g.x(j) * g.x(j), -2.0), 1e-13);
  }
  EXPECT_LE((P.data - ComplexMatrix(P.data.diagonal().asDiagonal())).norm(), 1e-13);
}

TEST(NegativePower, ShiftTooSmall) {
  const auto M = assemble_split(make_builtin("harmonic-1d"), Grid1D(12.0, 256));
  try {
    negative_power(M, -0.5, 1.0);
    FAIL() << "expected ShiftTooSmallError";
  } catch (const ShiftTooSmallError& e) {
    EXPECT_NEAR(e.required_q(), 0.0, 1e-8);
  }
}

// ---------------------------------------------------------------------------
// Schatten norms
// ---------------------------------------------------------------------------

TEST(SchattenNorm, GeometricTruncated) {
  std::vector<double> s;
  for (int k = 0; k <= 20; ++k) s.push_back(std::ldexp(1.0, -k));
  const auto r = schatten_norm(SingularValueSeries::from_values(s), 1.0, SchattenMode::truncated);
  EXPECT_NEAR(r.power_sum, 2.0 - std::ldexp(1.0, -20), 1e-15);
  EXPECT_FALSE(r.divergent);
}

TEST(SchattenNorm, HarmonicInverseSquaredSum) {
  const auto s = SingularValueSeries::from_spectrum(harmonic_spectrum(), 1.0, 1.0);
  ASSERT_TRUE(s.has_fit);
  const auto r2 = schatten_norm(s, 2.0, SchattenMode::continued);
  const double expect = std::numbers::pi * std::numbers::pi / 24.0;
  EXPECT_NEAR(r2.power_sum, expect, 0.01 * expect);
  EXPECT_NEAR(r2.norm, std::sqrt(r2.power_sum), 1e-15);
  EXPECT_TRUE(schatten_norm(s, 1.0, SchattenMode::continued).divergent) << s.alpha;
  EXPECT_THROW(schatten_norm(s, 0.5, SchattenMode::truncated), std::invalid_argument);
}

TEST(SingularValues, EqualEigenvaluesForPositiveDefinite) {
  const auto M = assemble_split(make_builtin("quartic-1d"), Grid1D(5.0, 128));
  for (double nu : {0.5, 1.0, 2.0}) {
    const auto P = negative_power(M, 2.0, nu);
    const auto sv = SingularValueSeries::from_matrix(P.data);
    auto ev = eigenvalues(P.data);
    std::sort(ev.rbegin(), ev.rend());
    double worst = 0.0;
    for (std::size_t k = 0; k < ev.size(); ++k) worst = std::max(worst, std::abs(sv.values[k] - ev[k]));
    EXPECT_LE(worst, 1e-10 * sv.values[0]) << nu;
  }
}

TEST(SingularValues, PowerSumsAreMultiplicative) {
  const auto M = assemble_split(make_builtin("harmonic-1d"), Grid1D(8.0, 128));
  for (double nu : {0.6, 1.0}) {
    for (double r : {1.0, 2.0, 3.0}) {
      const auto a = SingularValueSeries::from_matrix(negative_power(M, 1.0, nu).data);
      const auto b = SingularValueSeries::from_matrix(negative_power(M, 1.0, nu * r).data);
      const double lhs = schatten_norm(a, r, SchattenMode::truncated).power_sum;
      const double rhs = schatten_norm(b, 1.0, SchattenMode::truncated).power_sum;
      EXPECT_NEAR(lhs, rhs, 1e-10 * rhs) << nu << " " << r;
    }
  }
}

TEST(SingularValues, WeylProductInequality) {
  Rng rng(51);
  for (int trial = 0; trial < 5; ++trial) {
    const auto M = quantize_t(testing::complex_symbol(rng), 0.0, Grid1D(6.0, 64)).data;
    ASSERT_GT(hermitian_defect(M), 1e-3);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(M, false);
    std::vector<double> mods;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mods.rbegin(), mods.rend());
    const auto sv = SingularValueSeries::from_matrix(M);
    double pl = 1.0, ps = 1.0;
    for (int k = 0; k < 10; ++k) {
      pl *= mods[k];
      ps *= sv.values[k];
      ASSERT_LE(pl, ps * (1.0 + 1e-10)) << trial << " k=" << k;
    }
  }
}

TEST(PowerLaw, RecoversExactLaw) {
  std::vector<double> s;
  for (int k = 1; k <= 200; ++k) s.push_back(3.0 * std::pow(k, -1.7));
  const auto [c, alpha] = fit_power_law(s, 10, 200);
  EXPECT_NEAR(c, 3.0, 1e-10);
  EXPECT_NEAR(alpha, 1.7, 1e-12);
}

// ---------------------------------------------------------------------------
// membership
// ---------------------------------------------------------------------------

TEST(Membership, HarmonicExamples) {
  const auto spec = make_builtin("harmonic-1d", {1.0});
  const auto in = classify_membership(spec, 1.0, 1.1, harmonic_spectrum());
  EXPECT_EQ(in.verdict, Membership::in);
  EXPECT_TRUE(in.sufficient_condition);
  EXPECT_TRUE(in.agrees);
  const auto out = classify_membership(spec, 1.0, 0.9, harmonic_spectrum());
  EXPECT_EQ(out.verdict, Membership::out);
  EXPECT_FALSE(out.sufficient_condition);
  EXPECT_TRUE(out.agrees);
}

TEST(Membership, QuarticExample) {
  const auto spec = make_builtin("quartic-1d");
  const auto m = classify_membership(spec, 2.0, 0.4, quartic_spectrum());
  EXPECT_NEAR(m.threshold, 0.375, 1e-15);
  EXPECT_EQ(m.verdict, Membership::in);
  EXPECT_TRUE(m.agrees);
}

TEST(Membership, VerdictFollowsSignOfProduct) {
  Rng rng(52);
  const auto spec = make_builtin("quartic-1d");
  for (int trial = 0; trial < 40; ++trial) {
    const double r = testing::uniform(rng, 1.0, 3.0);
    const double nu = testing::uniform(rng, 0.1, 1.5);
    const auto m = classify_membership(spec, r, nu, quartic_spectrum());
    if (m.verdict == Membership::in) EXPECT_GT(m.product, 1.0);
    if (m.verdict == Membership::out) EXPECT_LT(m.product, 1.0);
    if (m.verdict != Membership::boundary && m.verdict != Membership::undetermined) {
      EXPECT_TRUE(m.agrees) << "r=" << r << " nu=" << nu;
    }
  }
}

TEST(Membership, SharpnessProbe) {
  const auto spec = make_builtin("harmonic-1d", {1.0});
  const double mu0 = threshold_mu0(1, 1.0, 1.0);
  for (double r : {1.0, 2.0}) {
    EXPECT_EQ(classify_membership(spec, r, mu0 / r - 0.1, harmonic_spectrum()).verdict, Membership::out) << r;
    EXPECT_EQ(classify_membership(spec, r, mu0 / r + 0.1, harmonic_spectrum()).verdict, Membership::in) << r;
  }
}

TEST(Membership, NeedsHundredTrustedValues) {
  const auto spec = make_builtin("harmonic-1d");
  const Spectrum small = eigensolve(assemble_split(spec, Grid1D(12.0, 256)));
  EXPECT_THROW(classify_membership(spec, 1.0, 1.0, small), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// trace and Hilbert-Schmidt identities
// ---------------------------------------------------------------------------

TEST(Identities, GaussianTraceAndNorm) {
  const Grid1D g(8.0, 256);
  const auto tr = trace_identity_check(gaussian(1.0), g);
  EXPECT_NEAR(tr.lhs, 0.5, 1e-3 * 0.5);
  EXPECT_NEAR(tr.rhs, 0.5, 1e-3 * 0.5);
  EXPECT_LE(tr.rel_err, 1e-3);
  const auto hs = hs_identity_check(gaussian(1.0), g);
  EXPECT_NEAR(hs.lhs, 0.5, 1e-3 * 0.5);
  EXPECT_NEAR(hs.rhs, 0.5, 1e-3 * 0.5);
}

TEST(Identities, WideGaussian) {
  const Grid1D g(10.0, 256);
  const auto tr = trace_identity_check(gaussian(2.0), g);
  EXPECT_NEAR(tr.lhs, 1.0, 1e-3);
  EXPECT_LE(tr.rel_err, 1e-3);
  const auto hs = hs_identity_check(gaussian(2.0), g);
  EXPECT_NEAR(hs.lhs, std::sqrt(0.5), 1e-3);
  EXPECT_LE(hs.rel_err, 1e-3);
}

TEST(Identities, ZeroSymbol) {
  PhaseSymbol zero;
  zero.fn = [](auto, auto) { return std::complex<double>(0.0); };
  const Grid1D g(4.0, 32);
  const auto tr = trace_identity_check(zero, g);
  EXPECT_EQ(tr.lhs, 0.0);
  EXPECT_EQ(tr.rhs, 0.0);
  EXPECT_EQ(tr.rel_err, 0.0);
  const auto hs = hs_identity_check(zero, g);
  EXPECT_EQ(hs.lhs, 0.0);
  EXPECT_EQ(hs.rel_err, 0.0);
}

TEST(Identities, TailCheck) {
  EXPECT_THROW(trace_identity_check(gaussian(1.0), Grid1D(2.0, 64)), DomainTooSmallError);
  const auto j = to_json(trace_identity_check(gaussian(1.0), Grid1D(8.0, 128)));
  EXPECT_TRUE(j.contains("lhs") && j.contains("rhs") && j.contains("rel_err"));
}

}  // namespace
}  // namespace anharm

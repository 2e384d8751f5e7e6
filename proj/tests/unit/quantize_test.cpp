#include "anharm/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "anharm/catalog.hpp"
#include "anharm/errors.hpp"
#include "anharm/spectrum.hpp"
#include "support/generators.hpp"

namespace anharm {
namespace {

using testing::Rng;

double rel_frobenius(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm() / b.norm(); }

PhaseSymbol symbol(std::function<std::complex<double>(double, double)> f) {
  PhaseSymbol a;
  a.fn = [f](std::span<const double> x, std::span<const double> xi) { return f(x[0], xi[0]); };
  return a;
}

std::vector<double> sorted_eigenvalues(const ComplexMatrix& M) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

// ---------------------------------------------------------------------------
// grid and DFT
// ---------------------------------------------------------------------------

TEST(Grid1D, NodesAndDualOrdering) {
  const Grid1D g(12.0, 8);
  EXPECT_DOUBLE_EQ(g.x(0), -12.0);
  EXPECT_DOUBLE_EQ(g.x(7), 9.0);
  EXPECT_DOUBLE_EQ(g.dxi(), std::numbers::pi / 12.0);
  const std::vector<int> k{0, 1, 2, 3, -4, -3, -2, -1};
  for (int m = 0; m < 8; ++m) EXPECT_EQ(g.wavenumber(m), k[m]);
  EXPECT_DOUBLE_EQ(g.xi_max(), 4.0 * std::numbers::pi / 12.0);
  EXPECT_DOUBLE_EQ(g.wrap(13.0), -11.0);
  EXPECT_DOUBLE_EQ(g.wrap(-12.0), -12.0);
  EXPECT_THROW(Grid1D(1.0, 7), std::invalid_argument);
  EXPECT_THROW(Grid1D(-1.0, 8), std::invalid_argument);
}

TEST(Dft, Unitary) {
  for (int N : {16, 64, 256}) {
    const ComplexMatrix U = dft_matrix(Grid1D(5.0, N));
    const double defect = (U.adjoint() * U - ComplexMatrix::Identity(N, N)).norm();
    EXPECT_LE(defect, 1e-12 * N) << N;
  }
}

// ---------------------------------------------------------------------------
// split assembly
// ---------------------------------------------------------------------------

TEST(AssembleSplit, PotentialOnlyIsDiagonal) {
  const OperatorSpec s(TauFunction::zero(1.0), TauFunction::even_power(1.0), 1.0);
  const Grid1D g(6.0, 32);
  const auto M = assemble_split(s, g);
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) {
      const std::complex<double> expect = i == j ? g.x(i) * g.x(i) : 0.0;
      EXPECT_LE(std::abs(M.data(i, j) - expect), 1e-13) << i << "," << j;
    }
  }
}

TEST(AssembleSplit, MultiplierOnlyHasBracketSpectrum) {
  const OperatorSpec s(TauFunction::bracket(0.5), TauFunction::zero(1.0), 1.0);
  const Grid1D g(10.0, 128);
  const auto ev = sorted_eigenvalues(assemble_split(s, g).data);
  std::vector<double> expect;
  for (int m = 0; m < 128; ++m) expect.push_back(std::sqrt(1.0 + g.xi(m) * g.xi(m)));
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 128; ++i) EXPECT_NEAR(ev[i], expect[i], 1e-10 * expect[i]);
}

TEST(AssembleSplit, HermitianAndRayleighBound) {
  for (const char* name : {"harmonic-1d", "quartic-1d", "sixth-1d", "frac-rel-1d", "frac-rel-gamma"}) {
    const auto spec = make_builtin(name);
    const Grid1D g(6.0, 128);
    const auto M = assemble_split(spec, g);
    EXPECT_LE(hermitian_defect(M.data), 1e-12) << name;
    double vmin = INFINITY;
    for (int j = 0; j < g.N(); ++j) vmin = std::min(vmin, spec.V().eval(g.x(j)));
    EXPECT_GE(sorted_eigenvalues(M.data).front(), vmin - 1e-9) << name;
  }
}

TEST(AssembleSplit, TwoDimensionalIsKroneckerSum) {
  const auto spec = make_builtin("harmonic-2d");
  const Grid1D g(5.0, 16);
  const auto M = assemble_split(spec, g);
  ASSERT_EQ(M.data.rows(), 256);
  const auto M1 = assemble_split(make_builtin("harmonic-1d"), g).data;
  const ComplexMatrix I = ComplexMatrix::Identity(16, 16);
  ComplexMatrix K(256, 256);
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) K.block(16 * a, 16 * b, 16, 16) = M1(a, b) * I + (a == b ? 1.0 : 0.0) * M1;
  }
  EXPECT_LE(rel_frobenius(M.data, K), 1e-12);
  EXPECT_THROW(assemble_split(spec, Grid1D(5.0, 128)), std::invalid_argument);
}

TEST(AssembleSplit, NonFiniteMultiplierNamesTheNode) {
  const OperatorSpec s(TauFunction::expression(Expression::parse("1/x^2"), 1.0), TauFunction::even_power(1.0));
  try {
    assemble_split(s, Grid1D(4.0, 16));
    FAIL() << "expected AssemblyError";
  } catch (const AssemblyError& e) {
    EXPECT_EQ(e.node(), 0);
  }
}

TEST(AssembleSplit, GridRefinementKeepsLowEigenvalues) {
  const auto spec = make_builtin("harmonic-1d");
  const auto coarse = sorted_eigenvalues(assemble_split(spec, Grid1D(12.0, 256)).data);
  const auto fine = sorted_eigenvalues(assemble_split(spec, Grid1D(15.0, 512)).data);
  for (int j = 0; j < 10; ++j) EXPECT_LE(std::abs(coarse[j] - fine[j]), 1e-6 * fine[j]) << j;
}

// ---------------------------------------------------------------------------
// t-quantization
// ---------------------------------------------------------------------------

TEST(QuantizeT, OneIsIdentity) {
  const Grid1D g(4.0, 32);
  for (double t : {0.0, 0.3, 0.5, 1.0}) {
    const auto M = quantize_t(symbol([](double, double) { return 1.0; }), t, g);
    EXPECT_LE((M.data - ComplexMatrix::Identity(32, 32)).norm(), 1e-12) << t;
  }
}

TEST(QuantizeT, FrequencySymbolIsMultiplier) {
  const Grid1D g(4.0, 32);
  const ComplexMatrix U = dft_matrix(g);
  Eigen::VectorXcd d(32);
  for (int m = 0; m < 32; ++m) d(m) = g.xi(m);
  const ComplexMatrix expect = U.adjoint() * d.asDiagonal() * U;
  for (double t : {0.0, 0.5, 1.0}) {
    const auto M = quantize_t(symbol([](double, double xi) { return xi; }), t, g);
    EXPECT_LE((M.data - expect).norm(), 1e-11 * expect.norm()) << t;
  }
}

TEST(QuantizeT, BilinearWeylAverage) {
  const Grid1D g(4.0, 64);
  const auto a = symbol([](double x, double xi) { return x * xi; });
  const auto m0 = quantize_t(a, 0.0, g).data;
  const auto m1 = quantize_t(a, 1.0, g).data;
  const auto mh = quantize_t(a, 0.5, g).data;
  EXPECT_GT((m0 - m1).norm(), 1e-3 * m0.norm());
  // Linear in t only where the midpoint never wraps, i.e. |j - l| < N/2.
  double worst = 0.0;
  for (int j = 0; j < 64; ++j) {
    for (int l = 0; l < 64; ++l) {
      if (std::abs(j - l) < 32) worst = std::max(worst, std::abs(mh(j, l) - 0.5 * (m0(j, l) + m1(j, l))));
    }
  }
  EXPECT_LE(worst, 1e-10 * mh.cwiseAbs().maxCoeff());
}

TEST(QuantizeT, SplitSymbolsMatchAssembly) {
  for (const char* name : {"harmonic-1d", "quartic-1d", "frac-rel-1d"}) {
    const auto spec = make_builtin(name);
    const Grid1D g(6.0, 128);
    const auto ref = assemble_split(spec, g).data;
    for (double t : {0.0, 0.5, 1.0}) {
      const auto M = quantize_t(PhaseSymbol::split(spec.A(), spec.V()), t, g);
      EXPECT_LE(rel_frobenius(M.data, ref), 1e-10) << name << " t=" << t;
    }
  }
}

TEST(QuantizeT, WeylQuantizationOfRealSymbolsIsHermitian) {
  Rng rng(31);
  const Grid1D g(6.0, 96);
  for (int trial = 0; trial < 20; ++trial) {
    const auto M = quantize_t(testing::real_symbol(rng), 0.5, g);
    EXPECT_LE(hermitian_defect(M.data), 1e-10) << trial;
  }
}

// ---------------------------------------------------------------------------
// operator norm
// ---------------------------------------------------------------------------

TEST(OperatorNorm, Examples) {
  EXPECT_NEAR(operator_norm(ComplexMatrix::Identity(50, 50), 1e-12), 1.0, 1e-12);
  const OperatorSpec s(TauFunction::zero(1.0), TauFunction::even_power(1.0), 1.0);
  const auto M = assemble_split(s, Grid1D(12.0, 256));
  EXPECT_NEAR(operator_norm(M.data, 1e-12), 144.0, 144.0 * 1e-10);
}

TEST(OperatorNorm, AgreesWithSvd) {
  Rng rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    ComplexMatrix M = ComplexMatrix::Random(40, 40);
    const double svd = Eigen::JacobiSVD<ComplexMatrix>(M).singularValues()(0);
    EXPECT_NEAR(operator_norm(M, 1e-12), svd, 1e-8 * svd);
  }
}

TEST(OperatorNorm, OrderZeroSymbolStaysBounded) {
  const auto spec = make_builtin("harmonic-1d");
  const auto a = symbol([&](double x, double xi) {
    return x * x / (spec.q() + x * x + xi * xi);
  });
  std::vector<double> norms;
  for (int N : {128, 256, 512}) norms.push_back(operator_norm(quantize_t(a, 0.5, Grid1D(12.0, N)).data, 1e-10));
  const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
  EXPECT_LE(*hi, 2.0);
  EXPECT_LE(*hi / *lo, 1.1);
}

TEST(OperatorNorm, IterationCapThrows) {
  // Close top singular values converge slowly.
  ComplexMatrix M = ComplexMatrix::Zero(3, 3);
  M(0, 0) = 1.0;
  M(1, 1) = 0.999;
  M(2, 2) = 0.5;
  try {
    operator_norm(M, 1e-14, 5);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_estimate(), 0.9);
  }
  EXPECT_THROW(operator_norm(M, -1.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// export
// ---------------------------------------------------------------------------

TEST(MatrixExport, BinaryRoundTripAndLayout) {
  const ComplexMatrix M = ComplexMatrix::Random(5, 3);
  const auto path = std::filesystem::temp_directory_path() / "anharm_matrix_test.bin";
  write_binary(M, path);
  EXPECT_EQ(std::filesystem::file_size(path), 5u * 3u * 16u);
  EXPECT_EQ(read_binary(path, 5, 3), M);

  std::ifstream in(path, std::ios::binary);
  double head[4];
  in.read(reinterpret_cast<char*>(head), sizeof head);
  EXPECT_EQ(head[0], M(0, 0).real());
  EXPECT_EQ(head[1], M(0, 0).imag());
  EXPECT_EQ(head[2], M(0, 1).real());
  EXPECT_EQ(head[3], M(0, 1).imag());
  EXPECT_THROW(read_binary(path, 4, 4), Error);
  std::filesystem::remove(path);
}

TEST(MatrixExport, CsvHasFullPrecision) {
  ComplexMatrix M(1, 1);
  M(0, 0) = {0.1, -1.0 / 3.0};
  const auto path = std::filesystem::temp_directory_path() / "anharm_matrix_test.csv";
  write_csv(M, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "0.10000000000000001,-0.33333333333333331");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace anharm

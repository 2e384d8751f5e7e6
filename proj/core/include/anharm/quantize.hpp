#pragma once

#include <filesystem>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "anharm/operator_spec.hpp"
#include "anharm/symbols.hpp"

namespace anharm {

/// Periodic grid on [-L, L): x_j = -L + j 2L/N. Dual nodes xi = pi k / L for
/// k = -N/2 .. N/2-1, stored in multiplier order (k = 0, 1, .., N/2-1, -N/2, .., -1).
class Grid1D {
 public:
  Grid1D(double L, int N);

  double L() const noexcept { return L_; }
  int N() const noexcept { return N_; }
  double dx() const noexcept { return 2.0 * L_ / N_; }
  double dxi() const noexcept;
  double x(int j) const noexcept { return -L_ + j * dx(); }
  /// Signed wavenumber of storage slot m.
  int wavenumber(int m) const noexcept { return m < N_ / 2 ? m : m - N_; }
  double xi(int m) const noexcept { return dxi() * wavenumber(m); }
  /// |xi| of the -N/2 mode.
  double xi_max() const noexcept { return dxi() * (N_ / 2); }
  /// Periodic image of x in [-L, L).
  double wrap(double x) const noexcept;

 private:
  double L_;
  int N_;
};

using ComplexMatrix = Eigen::MatrixXcd;

/// Largest dense matrix built by the library.
inline constexpr int kMaxDense = 4096;

struct OperatorMatrix {
  ComplexMatrix data;
  Grid1D grid{1.0, 2};
  /// Spatial dimension; for 2 the basis index is j1 * N + j2.
  int dim = 1;
  std::string provenance;
  /// Eigenvalues above this level feel the periodization.
  double trust_energy = std::numeric_limits<double>::infinity();
};

/// U_{mj} = N^(-1/2) exp(-i xi_m x_j).
ComplexMatrix dft_matrix(const Grid1D& grid);

/// U* diag(A(xi)) U + diag(V(x)) for n = 1, and the same on the tensor grid
/// for n = 2 (N <= 64 per axis). Throws AssemblyError naming the node when A
/// or V is not finite there.
OperatorMatrix assemble_split(const OperatorSpec& spec, const Grid1D& grid);

/// Discretized t-quantization
///   M_{jl} = (1/N) sum_k exp(i xi_k d) a(x_j - (1-t) d, xi_k),
/// d the periodic difference x_j - x_l wrapped into (-L, L]; at |d| = L both
/// images are averaged. The symbol's position argument is wrapped into the
/// box. n = 2 is accepted for N <= 16 per axis.
OperatorMatrix quantize_t(const PhaseSymbol& a, double t, const Grid1D& grid);

/// Largest singular value by power iteration on M*M.
/// Throws ConvergenceError after max_iter iterations.
double operator_norm(const ComplexMatrix& M, double tol, int max_iter = 200000);

/// ||M - M*||_F / ||M||_F (0 for the zero matrix).
double hermitian_defect(const ComplexMatrix& M);

/// Row-major, little-endian doubles, real and imaginary parts interleaved,
/// no header.
void write_binary(const ComplexMatrix& M, const std::filesystem::path& path);
ComplexMatrix read_binary(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols);

/// One row per matrix row: re,im pairs, 17 significant digits.
void write_csv(const ComplexMatrix& M, const std::filesystem::path& path);

}  // namespace anharm

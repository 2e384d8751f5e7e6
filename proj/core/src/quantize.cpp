#include "anharm/quantize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "anharm/errors.hpp"

namespace anharm {

namespace {

using cd = std::complex<double>;

std::vector<cd> roots_of_unity(int N) {
  std::vector<cd> w(static_cast<std::size_t>(N));
  for (int p = 0; p < N; ++p) w[static_cast<std::size_t>(p)] = std::polar(1.0, 2.0 * std::numbers::pi * p / N);
  return w;
}

int mod(long long a, int N) {
  const long long r = a % N;
  return static_cast<int>(r < 0 ? r + N : r);
}

double boundary_min_1d(const TauFunction& f, double R) {
  return std::min(f.raw(std::span<const double>(&R, 1)), f.raw(std::span<const double>(std::array<double, 1>{-R})));
}

double boundary_min_2d(const TauFunction& f, const Grid1D& g, double R) {
  double lo = std::numeric_limits<double>::infinity();
  const double scale = R / g.L();
  for (int j = 0; j <= g.N(); ++j) {
    const double s = (j == g.N() ? g.L() : g.x(j)) * scale;
    for (const auto& p : {std::array<double, 2>{-R, s}, std::array<double, 2>{R, s},
                          std::array<double, 2>{s, -R}, std::array<double, 2>{s, R}}) {
      lo = std::min(lo, f.raw(p));
    }
  }
  return lo;
}

}  // namespace

Grid1D::Grid1D(double L, int N) : L_(L), N_(N) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("Grid1D: L must be positive");
  if (N < 2 || N % 2 != 0) throw std::invalid_argument("Grid1D: N must be even and at least 2");
}

double Grid1D::dxi() const noexcept { return std::numbers::pi / L_; }

double Grid1D::wrap(double x) const noexcept {
  const double p = 2.0 * L_;
  double y = std::fmod(x + L_, p);
  if (y < 0.0) y += p;
  return y - L_;
}

ComplexMatrix dft_matrix(const Grid1D& g) {
  const int N = g.N();
  ComplexMatrix U(N, N);
  const double s = 1.0 / std::sqrt(static_cast<double>(N));
  for (int m = 0; m < N; ++m) {
    for (int j = 0; j < N; ++j) U(m, j) = std::polar(s, -g.xi(m) * g.x(j));
  }
  return U;
}

OperatorMatrix assemble_split(const OperatorSpec& spec, const Grid1D& g) {
  const int N = g.N();
  const int n = spec.n();
  if (n != 1 && n != 2) throw std::invalid_argument("assemble_split: n must be 1 or 2");
  if (n == 2 && N > 64) throw std::invalid_argument("assemble_split: n = 2 supports N <= 64 per axis");
  const auto w = roots_of_unity(N);
  const auto Nu = static_cast<std::size_t>(N);

  OperatorMatrix out;
  out.grid = g;
  out.dim = n;
  out.provenance = "split-assembly";

  if (n == 1) {
    std::vector<double> a(Nu);
    for (int m = 0; m < N; ++m) {
      const double xi = g.xi(m);
      a[static_cast<std::size_t>(m)] = spec.A().raw(std::span<const double>(&xi, 1));
      if (!std::isfinite(a[static_cast<std::size_t>(m)])) {
        throw AssemblyError("assemble_split: A is not finite at dual node " + std::to_string(m), m);
      }
    }
    // Circulant kernel c(p) = (1/N) sum_m A(xi_m) exp(2 pi i k_m p / N).
    std::vector<cd> c(Nu);
    for (int p = 0; p < N; ++p) {
      cd s = 0.0;
      for (int m = 0; m < N; ++m) s += a[static_cast<std::size_t>(m)] * w[static_cast<std::size_t>(mod(static_cast<long long>(g.wavenumber(m)) * p, N))];
      c[static_cast<std::size_t>(p)] = s / static_cast<double>(N);
    }
    out.data.resize(N, N);
    for (int j = 0; j < N; ++j) {
      for (int l = 0; l < N; ++l) out.data(j, l) = c[static_cast<std::size_t>(mod(j - l, N))];
      const double x = g.x(j);
      const double v = spec.V().raw(std::span<const double>(&x, 1));
      if (!std::isfinite(v)) throw AssemblyError("assemble_split: V is not finite at node " + std::to_string(j), j);
      out.data(j, j) += v;
    }
    out.trust_energy = 0.5 * std::min(boundary_min_1d(spec.V(), g.L()), boundary_min_1d(spec.A(), g.xi_max()));
    return out;
  }

  // n = 2: kernel c(p1, p2) computed one axis at a time.
  std::vector<double> a(Nu * Nu);
  for (int m1 = 0; m1 < N; ++m1) {
    for (int m2 = 0; m2 < N; ++m2) {
      const std::array<double, 2> xi{g.xi(m1), g.xi(m2)};
      const double v = spec.A().raw(xi);
      const int node = m1 * N + m2;
      if (!std::isfinite(v)) throw AssemblyError("assemble_split: A is not finite at dual node " + std::to_string(node), node);
      a[static_cast<std::size_t>(node)] = v;
    }
  }
  std::vector<cd> b(Nu * Nu);  // b(m1, p2)
  for (int m1 = 0; m1 < N; ++m1) {
    for (int p2 = 0; p2 < N; ++p2) {
      cd s = 0.0;
      for (int m2 = 0; m2 < N; ++m2) {
        s += a[static_cast<std::size_t>(m1 * N + m2)] * w[static_cast<std::size_t>(mod(static_cast<long long>(g.wavenumber(m2)) * p2, N))];
      }
      b[static_cast<std::size_t>(m1 * N + p2)] = s;
    }
  }
  std::vector<cd> c(Nu * Nu);
  for (int p1 = 0; p1 < N; ++p1) {
    for (int p2 = 0; p2 < N; ++p2) {
      cd s = 0.0;
      for (int m1 = 0; m1 < N; ++m1) {
        s += b[static_cast<std::size_t>(m1 * N + p2)] * w[static_cast<std::size_t>(mod(static_cast<long long>(g.wavenumber(m1)) * p1, N))];
      }
      c[static_cast<std::size_t>(p1 * N + p2)] = s / static_cast<double>(N * N);
    }
  }
  const int D = N * N;
  out.data.resize(D, D);
  for (int j1 = 0; j1 < N; ++j1) {
    for (int j2 = 0; j2 < N; ++j2) {
      const int row = j1 * N + j2;
      for (int l1 = 0; l1 < N; ++l1) {
        for (int l2 = 0; l2 < N; ++l2) {
          out.data(row, l1 * N + l2) = c[static_cast<std::size_t>(mod(j1 - l1, N) * N + mod(j2 - l2, N))];
        }
      }
      const std::array<double, 2> x{g.x(j1), g.x(j2)};
      const double v = spec.V().raw(x);
      if (!std::isfinite(v)) throw AssemblyError("assemble_split: V is not finite at node " + std::to_string(row), row);
      out.data(row, row) += v;
    }
  }
  out.trust_energy = 0.5 * std::min(boundary_min_2d(spec.V(), g, g.L()), boundary_min_2d(spec.A(), g, g.xi_max()));
  return out;
}

OperatorMatrix quantize_t(const PhaseSymbol& a, double t, const Grid1D& g) {
  const int N = g.N();
  if (a.dim != 1 && a.dim != 2) throw std::invalid_argument("quantize_t: dim must be 1 or 2");
  if (a.dim == 2 && N > 16) throw std::invalid_argument("quantize_t: dim 2 supports N <= 16 per axis");
  if (!std::isfinite(t)) throw std::invalid_argument("quantize_t: t must be finite");
  const auto w = roots_of_unity(N);
  const double dx = g.dx();

  // Images of a periodic index difference p: (offset in cells, weight).
  auto images = [N](int p) {
    std::vector<std::pair<int, double>> im;
    if (p == N / 2) {
      im = {{N / 2, 0.5}, {-N / 2, 0.5}};
    } else {
      im = {{p < N / 2 ? p : p - N, 1.0}};
    }
    return im;
  };
  auto check = [](cd v, int node) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw AssemblyError("quantize_t: symbol is not finite at quadrature node " + std::to_string(node), node);
    }
  };

  OperatorMatrix out;
  out.grid = g;
  out.dim = a.dim;
  out.provenance = "t-quantization t=" + std::to_string(t);

  if (a.dim == 1) {
    out.data.resize(N, N);
    for (int j = 0; j < N; ++j) {
      for (int l = 0; l < N; ++l) {
        cd s = 0.0;
        for (const auto& [off, wt] : images(mod(j - l, N))) {
          const double d = off * dx;
          const double mid = g.wrap(g.x(j) - (1.0 - t) * d);
          cd part = 0.0;
          for (int m = 0; m < N; ++m) {
            const cd v = a.at(mid, g.xi(m));
            check(v, m);
            part += w[static_cast<std::size_t>(mod(static_cast<long long>(g.wavenumber(m)) * off, N))] * v;
          }
          s += wt * part;
        }
        out.data(j, l) = s / static_cast<double>(N);
      }
    }
    return out;
  }

  const int D = N * N;
  out.data.resize(D, D);
  std::array<double, 2> mid{}, xi{};
  for (int r = 0; r < D; ++r) {
    const int j1 = r / N, j2 = r % N;
    for (int c = 0; c < D; ++c) {
      const int l1 = c / N, l2 = c % N;
      cd s = 0.0;
      for (const auto& [o1, w1] : images(mod(j1 - l1, N))) {
        for (const auto& [o2, w2] : images(mod(j2 - l2, N))) {
          mid[0] = g.wrap(g.x(j1) - (1.0 - t) * o1 * dx);
          mid[1] = g.wrap(g.x(j2) - (1.0 - t) * o2 * dx);
          cd part = 0.0;
          for (int m1 = 0; m1 < N; ++m1) {
            for (int m2 = 0; m2 < N; ++m2) {
              xi = {g.xi(m1), g.xi(m2)};
              const cd v = a(mid, xi);
              check(v, m1 * N + m2);
              const long long ph = static_cast<long long>(g.wavenumber(m1)) * o1 +
                                   static_cast<long long>(g.wavenumber(m2)) * o2;
              part += w[static_cast<std::size_t>(mod(ph, N))] * v;
            }
          }
          s += w1 * w2 * part;
        }
      }
      out.data(r, c) = s / static_cast<double>(D);
    }
  }
  return out;
}

double operator_norm(const ComplexMatrix& M, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be positive");
  if (M.size() == 0 || M.norm() == 0.0) return 0.0;
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(M.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cd(nd(rng), nd(rng));
  v.normalize();
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXcd mv = M * v;
    const double est = mv.squaredNorm();
    Eigen::VectorXcd z = M.adjoint() * mv;
    const double zn = z.norm();
    if (zn == 0.0) return std::sqrt(est);
    v = z / zn;
    if (it > 0 && std::abs(est - prev) <= tol * est) return std::sqrt(est);
    prev = est;
  }
  throw ConvergenceError("operator_norm: power iteration did not converge", std::sqrt(prev));
}

double hermitian_defect(const ComplexMatrix& M) {
  const double n = M.norm();
  if (n == 0.0) return 0.0;
  return (M - M.adjoint()).norm() / n;
}

void write_binary(const ComplexMatrix& M, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  auto put = [&](double v) {
    unsigned char b[sizeof(double)];
    std::memcpy(b, &v, sizeof v);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof b);
    os.write(reinterpret_cast<const char*>(b), sizeof b);
  };
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      put(M(i, j).real());
      put(M(i, j).imag());
    }
  }
  if (!os) throw Error("write failed: " + path.string());
}

ComplexMatrix read_binary(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  auto get = [&]() {
    unsigned char b[sizeof(double)];
    is.read(reinterpret_cast<char*>(b), sizeof b);
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof b);
    double v;
    std::memcpy(&v, b, sizeof v);
    return v;
  };
  ComplexMatrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = get();
      const double im = get();
      M(i, j) = cd(re, im);
    }
  }
  if (!is) throw Error("short read: " + path.string());
  return M;
}

void write_csv(const ComplexMatrix& M, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      std::fprintf(f, "%s%.17g,%.17g", j ? "," : "", M(i, j).real(), M(i, j).imag());
    }
    std::fputc('\n', f);
  }
  std::fclose(f);
}

}  // namespace anharm

#include "anharm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "anharm/errors.hpp"
#include "anharm/phasespace.hpp"

namespace anharm {

double Spectrum::lambda(std::size_t j) const {
  if (j < 1 || j > values.size()) throw std::out_of_range("Spectrum::lambda: index out of range (1-based)");
  return values[j - 1];
}

namespace {

// Solves (T - shift) y = b for symmetric tridiagonal T with partial pivoting;
// y overwrites b. Zero pivots are nudged to `tiny`, as inverse iteration wants.
void shifted_tridiagonal_solve(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double shift, double tiny,
                               Eigen::VectorXd& b) {
  const Eigen::Index n = d.size();
  // Row i of U holds u0 (diagonal), u1, u2 (second superdiagonal from pivoting).
  Eigen::VectorXd u0(n), u1 = Eigen::VectorXd::Zero(n), u2 = Eigen::VectorXd::Zero(n), mult(n);
  std::vector<bool> swapped(static_cast<std::size_t>(n), false);
  double diag = d(0) - shift;
  double sup = n > 1 ? e(0) : 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double below = e(i);
    const double next_diag = d(i + 1) - shift;
    const double next_sup = i + 2 < n ? e(i + 1) : 0.0;
    if (std::abs(diag) >= std::abs(below)) {
      if (diag == 0.0) diag = tiny;
      const double m = below / diag;
      u0(i) = diag;
      u1(i) = sup;
      u2(i) = 0.0;
      mult(i) = m;
      diag = next_diag - m * sup;
      sup = next_sup;
    } else {
      const double m = diag / below;
      u0(i) = below;
      u1(i) = next_diag;
      u2(i) = next_sup;
      mult(i) = m;
      swapped[static_cast<std::size_t>(i)] = true;
      diag = sup - m * next_diag;
      sup = -m * next_sup;
    }
  }
  u0(n - 1) = diag == 0.0 ? tiny : diag;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (swapped[static_cast<std::size_t>(i)]) std::swap(b(i), b(i + 1));
    b(i + 1) -= mult(i) * b(i);
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double v = b(i);
    if (i + 1 < n) v -= u1(i) * b(i + 1);
    if (i + 2 < n) v -= u2(i) * b(i + 2);
    b(i) = v / u0(i);
  }
}

// Eigenvalues from one tridiagonal reduction. For `residual_checks` random
// indices the eigenvector is rebuilt by inverse iteration on the tridiagonal
// form and checked against the original matrix.
template <class Mat>
Eigen::VectorXd solve_checked(const Mat& M, const EigensolveOptions& opts) {
  Eigen::Tridiagonalization<Mat> tri(M);
  const Eigen::VectorXd d = tri.diagonal().real();
  const Eigen::VectorXd e = tri.subDiagonal().real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigensolve: solver failed", 0.0);
  Eigen::VectorXd vals = es.eigenvalues();
  if (!opts.verify_residuals || vals.size() == 0) return vals;

  const double norm = std::max(std::abs(vals(0)), std::abs(vals(vals.size() - 1)));
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(norm, 1.0);
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, vals.size() - 1);
  std::normal_distribution<double> gauss;
  const auto Q = tri.matrixQ();
  for (int c = 0; c < opts.residual_checks; ++c) {
    const Eigen::Index k = pick(rng);
    Eigen::VectorXd y(vals.size());
    for (auto& v : y) v = gauss(rng);
    for (int it = 0; it < 3; ++it) {
      shifted_tridiagonal_solve(d, e, vals(k), tiny, y);
      y /= y.norm();
    }
    using Scalar = typename Mat::Scalar;
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = Q * y.cast<Scalar>();
    const double r = (M * v - vals(k) * v).norm();
    if (!(r <= 1e-8 * std::max(norm, 1.0))) {
      throw ConvergenceError("eigensolve: residual check failed at index " + std::to_string(k), r);
    }
  }
  return vals;
}

}  // namespace

Spectrum eigensolve(const OperatorMatrix& M, const EigensolveOptions& opts) {
  const ComplexMatrix& A = M.data;
  if (A.rows() != A.cols()) throw std::invalid_argument("eigensolve: matrix is not square");
  if (A.rows() > kMaxDense) throw std::invalid_argument("eigensolve: matrix exceeds the dense size cap");
  if (hermitian_defect(A) > opts.hermitian_tol) throw NotHermitianError("eigensolve: matrix is not Hermitian");

  Eigen::VectorXd vals;
  if (A.imag().norm() <= 1e-13 * A.norm()) {
    const Eigen::MatrixXd R = 0.5 * (A.real() + A.real().transpose());
    vals = solve_checked(R, opts);
  } else {
    const ComplexMatrix H = 0.5 * (A + A.adjoint());
    vals = solve_checked(H, opts);
  }

  Spectrum s;
  s.values.assign(vals.data(), vals.data() + vals.size());
  std::sort(s.values.begin(), s.values.end());
  s.trust_energy = M.trust_energy;
  s.trust_cutoff = static_cast<std::size_t>(
      std::upper_bound(s.values.begin(), s.values.end(), s.trust_energy) - s.values.begin());
  s.grid = M.grid;
  s.dim = M.dim;
  s.provenance = M.provenance;
  return s;
}

std::size_t counting(const Spectrum& s, double lambda) {
  if (lambda > s.trust_energy) {
    throw OutOfTrustError("counting: lambda = " + std::to_string(lambda) + " exceeds the trust energy " +
                          std::to_string(s.trust_energy));
  }
  const auto t = s.trusted();
  return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), lambda) - t.begin());
}

std::size_t counting_all(const Spectrum& s, double lambda) {
  return static_cast<std::size_t>(std::lower_bound(s.values.begin(), s.values.end(), lambda) -
                                  s.values.begin());
}

GrowthFit fit_growth_exponent(const Spectrum& s, std::size_t j_min, std::size_t j_max) {
  if (j_min < 1) throw FitError("fit_growth_exponent: indices are 1-based");
  if (j_max > s.trust_cutoff) throw FitError("fit_growth_exponent: window exceeds the trust cutoff");
  if (j_max < j_min + 30) throw FitError("fit_growth_exponent: window narrower than 30");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const auto m = static_cast<double>(j_max - j_min + 1);
  for (std::size_t j = j_min; j <= j_max; ++j) {
    const double l = s.lambda(j);
    if (!(l > 0.0)) throw FitError("fit_growth_exponent: nonpositive eigenvalue at j = " + std::to_string(j));
    const double x = std::log(static_cast<double>(j));
    const double y = std::log(l);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double cxx = sxx - sx * sx / m;
  const double cxy = sxy - sx * sy / m;
  const double cyy = syy - sy * sy / m;
  GrowthFit f;
  f.alpha = cxy / cxx;
  f.log_c = (sy - f.alpha * sx) / m;
  f.r2 = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
  f.j_min = j_min;
  f.j_max = j_max;
  return f;
}

GrowthFit fit_growth_exponent(const Spectrum& s) {
  return fit_growth_exponent(s, 20, std::min<std::size_t>(150, s.trust_cutoff));
}

double predicted_exponent(int n, double kappa, double gamma) {
  if (!(kappa > 0.0) || !(gamma > 0.0) || n < 1) throw std::invalid_argument("predicted_exponent: bad arguments");
  return 2.0 * kappa * gamma / (n * (kappa + gamma));
}

std::optional<std::size_t> growth_bound_start(const Spectrum& s, double r, double L) {
  if (!(r > 0.0)) throw std::invalid_argument("growth_bound: r must be positive");
  std::size_t last_fail = 0;
  for (std::size_t j = 1; j <= s.trust_cutoff; ++j) {
    const double lam = s.lambda(j);
    if (L * std::pow(static_cast<double>(j), 1.0 / r) > lam + kGrowthSlack * std::max(1.0, std::abs(lam))) last_fail = j;
  }
  if (s.trust_cutoff == 0 || last_fail == s.trust_cutoff) return std::nullopt;
  return last_fail + 1;
}

CheckReport certify_growth_bound(const Spectrum& s, double r, std::span<const double> L_list) {
  CheckReport rep;
  rep.condition = "growth-bound";
  rep.verdict = Verdict::pass;
  rep.samples = s.trust_cutoff;
  rep.constants["r"] = r;
  for (double L : L_list) {
    char key[64];
    std::snprintf(key, sizeof key, "L0[L=%g]", L);
    const auto start = growth_bound_start(s, r, L);
    if (start) {
      rep.constants[key] = static_cast<double>(*start);
      if (*start > 1) {
        rep.witnesses.push_back({std::string("last violation ") + key,
                                 {static_cast<double>(*start - 1)}, s.lambda(*start - 1)});
      }
    } else {
      rep.verdict = Verdict::fail;
      rep.notes.push_back(std::string(key) + ": no start index inside the trust window");
    }
  }
  return rep;
}

Grid1D suggest_grid(const OperatorSpec& spec, int N, std::size_t target) {
  const int n = spec.n();
  const double cell = std::pow(2.0 * std::numbers::pi, n);
  const double want = 1.2 * static_cast<double>(target);
  double hi = 1.0;
  while (classical_volume(spec, hi) / cell < want) {
    hi *= 2.0;
    if (hi > 1e300) throw DomainTooSmallError("suggest_grid: classical count never reaches the target");
  }
  double lo = hi / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (classical_volume(spec, mid) / cell < want ? lo : hi) = mid;
  }
  const double level = 2.0 * hi;

  // Smallest value of f on the sphere of radius r, probed along the axes.
  auto edge = [n](const TauFunction& f, double r) {
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    p[0] = r;
    const double a = f.raw(p);
    p[0] = -r;
    return std::min(a, f.raw(p));
  };
  auto solve = [&](auto&& pred, double a, double b) {
    for (int it = 0; it < 200; ++it) {
      const double m = std::sqrt(a * b);
      (pred(m) ? b : a) = m;
    }
    return b;
  };
  double top = 1.0;
  while (edge(spec.V(), top) < level) {
    top *= 2.0;
    if (top > 1e150) throw DomainTooSmallError("suggest_grid: potential never reaches the trust level");
  }
  const double L_lo = solve([&](double L) { return edge(spec.V(), L) >= level; }, top / 2.0, top);
  // A(pi N / 2L) >= level holds for small L; find where it stops.
  const double half = 0.5 * std::numbers::pi * N;
  double small = 1.0;
  while (edge(spec.A(), half / small) < level) {
    small /= 2.0;
    if (small < 1e-150) throw DomainTooSmallError("suggest_grid: multiplier never reaches the trust level");
  }
  double big = small;
  while (edge(spec.A(), half / big) >= level) big *= 2.0;
  const double L_hi = 1.0 / solve([&](double inv) { return edge(spec.A(), half * inv) >= level; },
                                  1.0 / big, 1.0 / small);
  if (L_lo > L_hi) {
    throw DomainTooSmallError("suggest_grid: N = " + std::to_string(N) + " cannot resolve " +
                              std::to_string(target) + " eigenvalues");
  }
  return Grid1D(std::sqrt(L_lo * L_hi), N);
}

void write_spectrum_csv(const Spectrum& s, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  std::fputs("j,lambda,trusted\n", f);
  for (std::size_t j = 1; j <= s.values.size(); ++j) {
    std::fprintf(f, "%zu,%.17g,%d\n", j, s.values[j - 1], j <= s.trust_cutoff ? 1 : 0);
  }
  std::fclose(f);
}

nlohmann::json to_json(const Spectrum& s) {
  nlohmann::json j;
  j["provenance"] = s.provenance;
  j["dim"] = s.dim;
  j["L"] = s.grid.L();
  j["N"] = s.grid.N();
  j["count"] = s.values.size();
  j["trust_cutoff"] = s.trust_cutoff;
  j["trust_energy"] = s.trust_energy;
  j["values"] = s.values;
  return j;
}

}  // namespace anharm

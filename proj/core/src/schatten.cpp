#include "anharm/schatten.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "anharm/errors.hpp"
#include "anharm/phasespace.hpp"

namespace anharm {

OperatorMatrix negative_power(const OperatorMatrix& M, double q, double nu) {
  if (!(nu >= 0.0)) throw std::invalid_argument("negative_power: nu must be nonnegative");
  if (hermitian_defect(M.data) > 1e-10) throw NotHermitianError("negative_power: matrix is not Hermitian");
  const ComplexMatrix H = 0.5 * (M.data + M.data.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  if (es.info() != Eigen::Success) throw ConvergenceError("negative_power: eigensolver failed", 0.0);
  const double lmin = es.eigenvalues()(0);
  if (!(q + lmin >= 1.0)) {
    throw ShiftTooSmallError("negative_power: q + lambda_min = " + std::to_string(q + lmin) + " < 1", 1.0 - lmin);
  }
  const Eigen::VectorXd d = (es.eigenvalues().array() + q).pow(-nu);
  OperatorMatrix out = M;
  out.data = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
  out.provenance = "negative-power(" + M.provenance + ")";
  return out;
}

std::pair<double, double> fit_power_law(const std::vector<double>& s, std::size_t k0, std::size_t k1) {
  if (k0 < 1 || k1 > s.size() || k1 < k0 + 3) throw FitError("fit_power_law: window needs at least 4 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto m = static_cast<double>(k1 - k0 + 1);
  for (std::size_t k = k0; k <= k1; ++k) {
    if (!(s[k - 1] > 0.0)) throw FitError("fit_power_law: nonpositive value at k = " + std::to_string(k));
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(s[k - 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (sxy - sx * sy / m) / (sxx - sx * sx / m);
  const double logc = (sy - slope * sx) / m;
  return {std::exp(logc), -slope};
}

SingularValueSeries SingularValueSeries::from_values(std::vector<double> values, std::size_t trusted,
                                                     std::string provenance) {
  SingularValueSeries s;
  std::sort(values.begin(), values.end(), std::greater<>());
  if (!values.empty() && values.back() < 0.0) throw std::invalid_argument("singular values must be nonnegative");
  s.values = std::move(values);
  s.trusted = std::min(trusted, s.values.size());
  s.provenance = std::move(provenance);
  if (s.trusted >= 8 && s.values[s.trusted - 1] > 0.0) {
    const auto [c, a] = fit_power_law(s.values, std::max<std::size_t>(1, s.trusted / 2), s.trusted);
    s.c = c;
    s.alpha = a;
    s.has_fit = true;
  }
  return s;
}

SingularValueSeries SingularValueSeries::from_spectrum(const Spectrum& sp, double q, double nu) {
  const auto t = sp.trusted();
  if (t.empty()) throw std::invalid_argument("from_spectrum: no trusted eigenvalues");
  if (!(q + t.front() >= 1.0)) {
    throw ShiftTooSmallError("from_spectrum: q + lambda_min = " + std::to_string(q + t.front()) + " < 1",
                             1.0 - t.front());
  }
  std::vector<double> v;
  v.reserve(t.size());
  for (double l : t) v.push_back(std::pow(q + l, -nu));
  return from_values(std::move(v), SIZE_MAX, "negative-power(" + sp.provenance + ")");
}

SingularValueSeries SingularValueSeries::from_matrix(const ComplexMatrix& M) {
  Eigen::BDCSVD<ComplexMatrix> svd(M);
  const Eigen::VectorXd sv = svd.singularValues();
  return from_values(std::vector<double>(sv.data(), sv.data() + sv.size()), SIZE_MAX, "svd");
}

SchattenResult schatten_norm(const SingularValueSeries& s, double r, SchattenMode mode) {
  if (!(r >= 1.0)) throw std::invalid_argument("schatten_norm: r must be at least 1");
  SchattenResult out;
  // Ascending order keeps small terms from being absorbed.
  for (std::size_t k = s.trusted; k-- > 0;) out.power_sum += std::pow(s.values[k], r);
  if (mode == SchattenMode::continued) {
    if (!s.has_fit) throw FitError("schatten_norm: no power-law fit for continuation");
    const double e = s.alpha * r;
    // Fits of an exact k^-1 law land a few ulps either side of 1.
    if (e <= 1.0 + 1e-9) {
      out.divergent = true;
      out.tail = std::numeric_limits<double>::infinity();
      out.power_sum = out.tail;
      out.norm = out.tail;
      return out;
    }
    // sum_{k > K} c^r k^(-e) ~ integral from K + 1/2.
    const double K = static_cast<double>(s.trusted) + 0.5;
    out.tail = std::pow(s.c, r) * std::pow(K, 1.0 - e) / (e - 1.0);
    out.power_sum += out.tail;
  }
  out.norm = std::pow(out.power_sum, 1.0 / r);
  return out;
}

std::string_view to_string(Membership m) noexcept {
  switch (m) {
    case Membership::in: return "IN";
    case Membership::out: return "OUT";
    case Membership::boundary: return "BOUNDARY";
    case Membership::undetermined: return "UNDETERMINED";
  }
  return "UNDETERMINED";
}

MembershipResult classify_membership(const OperatorSpec& spec, double r, double nu, const Spectrum& sp) {
  if (!(r >= 1.0) || !(nu > 0.0)) throw std::invalid_argument("classify_membership: need r >= 1, nu > 0");
  if (sp.trust_cutoff < 100) throw std::invalid_argument("classify_membership: fewer than 100 trusted eigenvalues");
  const SingularValueSeries s = SingularValueSeries::from_spectrum(sp, spec.q(), nu);
  const std::size_t K = s.trusted;
  const std::size_t k0 = K / 2;
  const std::size_t k1 = (3 * K) / 4;

  MembershipResult out;
  out.alpha_fit = fit_power_law(s.values, k0, K).second;
  const double a1 = fit_power_law(s.values, k0, k1).second;
  const double a2 = fit_power_law(s.values, k1, K).second;
  out.product = r * out.alpha_fit;
  out.threshold = threshold_mu0(spec.n(), spec.kappa(), spec.gamma()) / r;
  out.sufficient_condition = nu > out.threshold;
  if (std::abs(a1 - a2) > 0.05 * std::max(1.0, out.alpha_fit)) {
    out.verdict = Membership::undetermined;
  } else if (std::abs(out.product - 1.0) < 0.05) {
    out.verdict = Membership::boundary;
  } else {
    out.verdict = out.product > 1.0 ? Membership::in : Membership::out;
    out.agrees = (out.verdict == Membership::in) == out.sufficient_condition;
  }
  return out;
}

nlohmann::json to_json(const IdentityCheck& c) {
  return {{"lhs", c.lhs}, {"rhs", c.rhs}, {"rel_err", c.rel_err}};
}

namespace {

void check_tail(const PhaseSymbol& a, const Grid1D& g) {
  if (a.dim != 1) throw std::invalid_argument("identity checks need a one-dimensional symbol");
  double inner = 0.0;
  for (int j = 0; j < g.N(); ++j) {
    for (int m = 0; m < g.N(); ++m) inner = std::max(inner, std::abs(a.at(g.x(j), g.xi(m))));
  }
  double edge = 0.0;
  const double L = g.L();
  const double X = g.xi_max();
  for (int i = 0; i <= g.N(); ++i) {
    const double x = i == g.N() ? L : g.x(i);
    const double xi = -X + 2.0 * X * i / g.N();
    for (double v : {std::abs(a.at(x, -X)), std::abs(a.at(x, X)), std::abs(a.at(-L, xi)), std::abs(a.at(L, xi))}) {
      edge = std::max(edge, v);
    }
  }
  if (edge > 1e-10 * inner) {
    throw DomainTooSmallError("identity check: symbol is not negligible on the box boundary (" +
                              std::to_string(edge) + " vs max " + std::to_string(inner) + ")");
  }
}

double rel(double lhs, double rhs) {
  if (lhs == 0.0 && rhs == 0.0) return 0.0;
  return std::abs(lhs - rhs) / std::max(std::abs(rhs), std::abs(lhs));
}

}  // namespace

IdentityCheck trace_identity_check(const PhaseSymbol& a, const Grid1D& g, double t) {
  check_tail(a, g);
  const OperatorMatrix M = quantize_t(a, t, g);
  IdentityCheck c;
  c.lhs = M.data.trace().real();
  const double cell = g.dx() * g.dxi() / (2.0 * std::numbers::pi);
  double sum = 0.0;
  for (int j = 0; j < g.N(); ++j) {
    for (int m = 0; m < g.N(); ++m) sum += a.at(g.x(j), g.xi(m)).real();
  }
  c.rhs = cell * sum;
  c.rel_err = rel(c.lhs, c.rhs);
  return c;
}

IdentityCheck hs_identity_check(const PhaseSymbol& a, const Grid1D& g, double t) {
  check_tail(a, g);
  const OperatorMatrix M = quantize_t(a, t, g);
  IdentityCheck c;
  c.lhs = M.data.norm();
  double sum = 0.0;
  for (int j = 0; j < g.N(); ++j) {
    for (int m = 0; m < g.N(); ++m) sum += std::norm(a.at(g.x(j), g.xi(m)));
  }
  c.rhs = std::sqrt(sum * g.dx() * g.dxi() / (2.0 * std::numbers::pi));
  c.rel_err = rel(c.lhs, c.rhs);
  return c;
}

}  // namespace anharm

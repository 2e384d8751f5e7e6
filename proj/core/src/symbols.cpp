#include "anharm/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "anharm/errors.hpp"
#include "anharm/sampling.hpp"

namespace anharm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Calls fn on every point of the coarse grid used for minima and parity tests.
template <class Fn>
void for_coarse_points(int dim, Fn&& fn) {
  std::vector<double> p(static_cast<std::size_t>(dim));
  if (dim == 1) {
    for (int i = 0; i <= 200; ++i) {
      p[0] = -10.0 + 0.1 * i;
      fn(std::span<const double>(p));
    }
  } else if (dim == 2) {
    for (int i = 0; i <= 80; ++i) {
      for (int j = 0; j <= 80; ++j) {
        p[0] = -10.0 + 0.25 * i;
        p[1] = -10.0 + 0.25 * j;
        fn(std::span<const double>(p));
      }
    }
  } else {
    Rng rng(0x5eed);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int s = 0; s < 20000; ++s) {
      for (double& v : p) v = u(rng);
      fn(std::span<const double>(p));
    }
  }
}

}  // namespace

TauFunction TauFunction::even_power(double tau, int dim) {
  TauFunction f;
  f.kind_ = Kind::even_power;
  f.tau_ = tau;
  f.dim_ = dim;
  f.finish(std::nullopt);
  return f;
}

TauFunction TauFunction::bracket(double tau, int dim) {
  TauFunction f;
  f.kind_ = Kind::bracket;
  f.tau_ = tau;
  f.dim_ = dim;
  f.finish(std::nullopt);
  return f;
}

TauFunction TauFunction::zero(double tau, int dim) {
  TauFunction f = even_power(tau, dim);
  f.zero_ = true;
  return f;
}

TauFunction TauFunction::perturbed(const TauFunction& base, Expression perturbation,
                                   std::optional<double> q_floor) {
  if (!base.is_builtin()) throw std::invalid_argument("perturbed: base must be a builtin kind");
  TauFunction f = base;
  f.kind_ = Kind::perturbed;
  f.base_kind_ = base.kind_;
  f.expr_ = std::move(perturbation);
  f.finish(q_floor);
  return f;
}

TauFunction TauFunction::expression(Expression e, double tau, int dim,
                                    std::optional<double> q_floor) {
  TauFunction f;
  f.kind_ = Kind::expression;
  f.tau_ = tau;
  f.dim_ = dim;
  f.expr_ = std::move(e);
  f.finish(q_floor);
  return f;
}

void TauFunction::finish(std::optional<double> q_floor) {
  if (!(tau_ > 0.0)) throw std::invalid_argument("tau must be positive");
  if (dim_ < 1) throw std::invalid_argument("dim must be positive");
  if (expr_ && expr_->max_index() >= dim_) {
    throw std::invalid_argument("expression '" + expr_->text() + "' indexes past dim " +
                                std::to_string(dim_));
  }
  if (is_builtin()) {
    even_ = true;
    q_floor_ = q_floor.value_or(1.0);
    return;
  }
  even_ = true;
  std::vector<double> neg(static_cast<std::size_t>(dim_));
  for_coarse_points(dim_, [&](std::span<const double> p) {
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -p[i];
    const double a = raw(p);
    const double b = raw(neg);
    if (!(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)))) even_ = false;
  });
  const double lo = coarse_minimum(*this);
  q_floor_ = q_floor.value_or(std::max(1.0, -4.0 * lo + 1.0));
  if (!(q_floor_ > 0.0)) throw std::invalid_argument("q_floor must be positive");
}

double TauFunction::raw(std::span<const double> x) const noexcept {
  if (zero_) return 0.0;
  const double r2 = norm2(x);
  const Kind k = kind_ == Kind::perturbed ? base_kind_ : kind_;
  double base = 0.0;
  if (kind_ != Kind::expression) {
    base = k == Kind::bracket ? std::pow(1.0 + r2, tau_) : std::pow(r2, tau_);
  }
  if (expr_) base += (*expr_)(x, x);
  return base;
}

double TauFunction::eval(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_)) {
    throw std::invalid_argument("point dimension does not match tau-function dim");
  }
  const double v = raw(x);
  if (!std::isfinite(v)) {
    throw EvaluationError("non-finite value of " + formula(), std::vector<double>(x.begin(), x.end()));
  }
  return v;
}

double TauFunction::radial(double r) const noexcept {
  if (is_builtin()) {
    if (zero_) return 0.0;
    return kind_ == Kind::bracket ? std::pow(1.0 + r * r, tau_) : std::pow(r * r, tau_);
  }
  std::vector<double> p(static_cast<std::size_t>(dim_), 0.0);
  p[0] = r;
  return raw(p);
}

std::optional<double> TauFunction::radial_inverse(double level) const noexcept {
  if (!is_builtin()) return std::nullopt;
  if (zero_) return level > 0.0 ? kInf : 0.0;
  if (kind_ == Kind::bracket) {
    if (level <= 1.0) return 0.0;
    return std::sqrt(std::pow(level, 1.0 / tau_) - 1.0);
  }
  if (level <= 0.0) return 0.0;
  return std::pow(level, 0.5 / tau_);
}

std::string TauFunction::formula() const {
  if (zero_) return "0";
  const std::string p = fmt_num(2.0 * tau_);
  const Kind k = kind_ == Kind::perturbed ? base_kind_ : kind_;
  std::string base = k == Kind::bracket ? "<x>^" + p : "|x|^" + p;
  if (kind_ == Kind::expression) return expr_->text();
  if (kind_ == Kind::perturbed) return base + " + (" + expr_->text() + ")";
  return base;
}

double coarse_minimum(const TauFunction& f) {
  double lo = kInf;
  for_coarse_points(f.dim(), [&](std::span<const double> p) {
    const double v = f.raw(p);
    if (std::isfinite(v)) lo = std::min(lo, v);
  });
  return lo;
}

double default_q(const TauFunction& A, const TauFunction& V) {
  return std::max(1.0, 1.0 - (coarse_minimum(A) + coarse_minimum(V))) + 1.0;
}

PhaseSymbol PhaseSymbol::from_expression(const Expression& e, int dim, double order) {
  PhaseSymbol s;
  s.fn = [e](std::span<const double> x, std::span<const double> xi) {
    return std::complex<double>(e(x, xi), 0.0);
  };
  s.dim = dim;
  s.order = order;
  s.label = e.text();
  return s;
}

PhaseSymbol PhaseSymbol::split(const TauFunction& A, const TauFunction& V, double order) {
  PhaseSymbol s;
  s.fn = [A, V](std::span<const double> x, std::span<const double> xi) {
    return std::complex<double>(A.raw(xi) + V.raw(x), 0.0);
  };
  s.dim = A.dim();
  s.order = order;
  s.label = A.formula() + " (xi) + " + V.formula() + " (x)";
  return s;
}

CheckReport check_tau_lipschitz(const TauFunction& f, double q, double R,
                                std::uint64_t sample_count, std::uint64_t seed) {
  if (!(q >= f.q_floor())) throw std::invalid_argument("check_tau_lipschitz: q below q_floor");
  if (!(R > 0.0)) throw std::invalid_argument("check_tau_lipschitz: R must be positive");
  if (sample_count == 0) throw std::invalid_argument("check_tau_lipschitz: sample_count is zero");

  DoublingPlan plan;
  plan.base = sample_count;
  plan.radius = std::max(10.0 * R, 1e3);
  const auto n = static_cast<std::size_t>(f.dim());
  const double inv = 0.5 / f.tau();
  auto root = [&](std::span<const double> p) {
    const double v = f.raw(p);
    return std::isfinite(v) ? std::pow(0.5 * q + v, inv) : kInf;
  };

  Rng rng(seed);
  std::vector<double> x(n), d(n), y(n);
  std::vector<double> history;
  double sup = 0.0;
  Witness worst{"sup ratio", {}, 0.0};
  std::uint64_t used = 0;
  const std::uint64_t total = plan.total();
  for (std::uint64_t i = 0; i < total; ++i) {
    const int tier = plan.tier_of(i);
    log_radial_point(rng, R, plan.radius_cap(tier), x);
    random_direction(rng, d);
    const double len = log_uniform(rng, 1e-3, 10.0) * std::max(1.0, std::sqrt(norm2(x)));
    for (std::size_t k = 0; k < n; ++k) y[k] = x[k] + len * d[k];
    if (norm2(y) < R * R) {
      for (std::size_t k = 0; k < n; ++k) y[k] = x[k] - len * d[k];
    }
    if (norm2(y) >= R * R && len > 0.0) {
      ++used;
      const double fx = root(x);
      const double fy = root(y);
      double ratio = std::abs(fx - fy) / len;
      if (!std::isfinite(ratio)) ratio = kInf;
      if (ratio > sup || worst.point.empty()) {
        sup = std::max(sup, ratio);
        worst.point.assign(x.begin(), x.end());
        worst.point.insert(worst.point.end(), y.begin(), y.end());
        worst.value = ratio;
      }
    }
    if (i + 1 == plan.prefix_size(static_cast<int>(history.size()))) history.push_back(sup);
  }
  if (used == 0) throw InsufficientSamplesError("check_tau_lipschitz: every sampled pair was skipped");

  CheckReport rep;
  rep.condition = "tau-lipschitz";
  rep.samples = used;
  rep.seed = seed;
  rep.history = history;
  rep.verdict = doubling_verdict(history);
  rep.constants["sup_ratio"] = sup;
  rep.constants["C1"] = sup > 0.0 ? 1.0 / sup : kInf;
  rep.constants["R"] = R;
  rep.constants["q"] = q;
  rep.witnesses.push_back(std::move(worst));
  return rep;
}

CheckReport check_cstar(const TauFunction& f, std::uint64_t sample_count, std::uint64_t seed) {
  if (sample_count == 0) throw std::invalid_argument("check_cstar: sample_count is zero");
  DoublingPlan plan;
  plan.base = sample_count;
  const auto n = static_cast<std::size_t>(f.dim());
  const std::uint64_t total = plan.total();

  struct Sample {
    double r;
    double ratio;
    std::vector<double> x;
  };
  std::vector<Sample> samples;
  samples.reserve(total);
  Rng rng(seed);
  std::vector<double> x(n);
  for (std::uint64_t i = 0; i < total; ++i) {
    log_radial_point(rng, 1.0, plan.radius_cap(plan.tier_of(i)), x);
    const double r = std::sqrt(norm2(x));
    const double g = f.eval(x);
    samples.push_back({r, g / std::pow(r, 2.0 * f.tau()), x});
  }

  auto inf_over = [&](std::uint64_t count, double c2, std::size_t* arg) {
    double lo = kInf;
    for (std::uint64_t i = 0; i < count; ++i) {
      if (samples[i].r >= c2 && samples[i].ratio < lo) {
        lo = samples[i].ratio;
        if (arg) *arg = static_cast<std::size_t>(i);
      }
    }
    return lo;
  };

  CheckReport rep;
  rep.condition = "cstar";
  rep.samples = total;
  rep.seed = seed;

  double c2 = 0.0;
  for (double cand = 1.0; cand <= 64.0; cand *= 2.0) {
    if (inf_over(total, cand, nullptr) > 0.0) {
      c2 = cand;
      break;
    }
  }
  if (c2 == 0.0) {
    rep.verdict = Verdict::fail;
    std::size_t arg = 0;
    const double lo = inf_over(total, 64.0, &arg);
    rep.witnesses.push_back({"nonpositive ratio", samples[arg].x, lo});
    rep.notes.push_back("no C2 in {1,...,64} gives a positive infimum");
    return rep;
  }
  for (int k = 0; k <= plan.doublings; ++k) {
    rep.history.push_back(inf_over(plan.prefix_size(k), c2, nullptr));
  }
  std::size_t arg = 0;
  const double c1 = inf_over(total, c2, &arg);
  rep.verdict = doubling_verdict(rep.history, 1.25, /*decreasing=*/true);
  rep.constants["C1"] = c1;
  rep.constants["C2"] = c2;
  rep.witnesses.push_back({"inf ratio", samples[arg].x, c1});
  return rep;
}

namespace {

struct Stencil {
  std::vector<int> offsets;
  std::vector<double> weights;
};

const Stencil& stencil(int order) {
  static const Stencil table[] = {
      {{0}, {1.0}},
      {{-1, 1}, {-0.5, 0.5}},
      {{-1, 0, 1}, {1.0, -2.0, 1.0}},
      {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
      {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
  };
  return table[order];
}

// Multi-indices over 2n variables (xi first, then x) with total order <= max.
void enumerate(std::vector<int>& cur, std::size_t pos, int left, std::vector<std::vector<int>>& out) {
  if (pos == cur.size()) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= left; ++k) {
    cur[pos] = k;
    enumerate(cur, pos + 1, left - k, out);
  }
  cur[pos] = 0;
}

constexpr int kMaxHalvings = 40;

struct FdResult {
  std::complex<double> value;
  double noise;
  bool finite;
};

}  // namespace

CheckReport check_sigma_membership(const PhaseSymbol& a, const TauFunction& A,
                                   const TauFunction& V, double m, const SigmaOptions& opts) {
  if (opts.max_order < 0 || opts.max_order > 4) {
    throw std::invalid_argument("check_sigma_membership: max_order must be in [0, 4]");
  }
  if (A.dim() != V.dim() || a.dim != A.dim()) {
    throw std::invalid_argument("check_sigma_membership: dimension mismatch");
  }
  if (opts.sample_count == 0) throw std::invalid_argument("check_sigma_membership: sample_count is zero");
  const auto n = static_cast<std::size_t>(a.dim);
  const double q = opts.q.value_or(default_q(A, V));
  const double gamma = A.tau();
  const double kappa = V.tau();

  std::vector<std::vector<int>> indices;
  std::vector<int> cur(2 * n, 0);
  enumerate(cur, 0, opts.max_order, indices);
  const std::size_t ni = indices.size();

  DoublingPlan plan;
  plan.base = opts.sample_count;
  const std::uint64_t total = plan.total();

  std::vector<double> sup(ni, 0.0);
  std::vector<std::vector<double>> hist(ni);
  std::vector<Witness> worst(ni);
  std::uint64_t flags = 0;

  Rng rng(opts.seed);
  std::vector<double> z(2 * n), px(n), pxi(n);
  std::vector<double> h(2 * n);

  // Tensor-product central difference for one multi-index at step scale s.
  auto difference = [&](const std::vector<int>& idx, double s) {
    FdResult r{0.0, 0.0, true};
    std::vector<std::size_t> counter(2 * n, 0);
    double scale = 1.0;
    for (std::size_t v = 0; v < 2 * n; ++v) scale *= std::pow(h[v] * s, idx[v]);
    for (;;) {
      double w = 1.0;
      for (std::size_t v = 0; v < 2 * n; ++v) {
        const Stencil& st = stencil(idx[v]);
        w *= st.weights[counter[v]];
        const double shift = st.offsets[counter[v]] * h[v] * s;
        if (v < n) {
          pxi[v] = z[n + v] + shift;
        } else {
          px[v - n] = z[v - n] + shift;
        }
      }
      const std::complex<double> val = a(px, pxi);
      if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) r.finite = false;
      r.value += w * val;
      r.noise += std::abs(w) * std::abs(val);
      std::size_t v = 0;
      for (; v < 2 * n; ++v) {
        if (++counter[v] < stencil(idx[v]).offsets.size()) break;
        counter[v] = 0;
      }
      if (v == 2 * n) break;
    }
    r.value /= scale;
    r.noise *= 4.0 * std::numeric_limits<double>::epsilon() / scale;
    return r;
  };

  for (std::uint64_t i = 0; i < total; ++i) {
    // z = (x, xi): first n entries position, last n frequency.
    log_radial_point(rng, 1e-3, plan.radius_cap(plan.tier_of(i)), z);
    std::span<const double> zx(z.data(), n), zxi(z.data() + n, n);
    const double M = q + V.raw(zx) + A.raw(zxi);
    if (!std::isfinite(M)) throw EvaluationError("check_sigma_membership: non-finite weight", z);
    for (std::size_t v = 0; v < n; ++v) {
      const bool adapted = opts.step_rule == FdStepRule::metric_adapted;
      h[v] = opts.rel_step * (adapted ? std::pow(M, 0.5 / gamma) : 1.0);      // xi step
      h[n + v] = opts.rel_step * (adapted ? std::pow(M, 0.5 / kappa) : 1.0);  // x step
    }
    for (std::size_t j = 0; j < ni; ++j) {
      const auto& idx = indices[j];
      int na = 0, nb = 0;
      for (std::size_t v = 0; v < n; ++v) {
        na += idx[v];
        nb += idx[n + v];
      }
      const FdResult d1 = difference(idx, 1.0);
      double ratio = 0.0;
      const double bound = std::pow(M, m - nb / (2.0 * kappa) - na / (2.0 * gamma));
      if (!d1.finite) {
        ratio = kInf;
      } else if (na + nb == 0) {
        ratio = std::abs(d1.value) / bound;
      } else {
        // Halve the step until two successive estimates agree; a coarse
        // metric-scaled step can straddle structure on a finer scale.
        FdResult cur = d1;
        double s = 1.0;
        bool settled = false;
        double est = 0.0;
        for (int it = 0; it < kMaxHalvings; ++it) {
          const FdResult next = difference(idx, 0.5 * s);
          const double m1 = std::abs(cur.value);
          const double m2 = std::abs(next.value);
          const bool sig1 = m1 > 100.0 * cur.noise;
          const bool sig2 = m2 > 100.0 * next.noise;
          if (!next.finite) break;
          if (!sig1 && !sig2) {
            est = 0.0;
            settled = true;
            break;
          }
          if (std::abs(cur.value - next.value) <= 0.1 * std::max(m1, m2)) {
            est = m2;
            settled = true;
            break;
          }
          if (!sig2) {
            // Round-off took over before the estimates agreed.
            est = m1;
            break;
          }
          est = m2;
          cur = next;
          s *= 0.5;
        }
        if (!settled) ++flags;
        ratio = est / bound;
      }
      if (ratio > sup[j] || worst[j].point.empty()) {
        sup[j] = std::max(sup[j], ratio);
        worst[j].point = z;
        worst[j].value = ratio;
      }
    }
    for (int k = 0; k <= plan.doublings; ++k) {
      if (i + 1 == plan.prefix_size(k)) {
        for (std::size_t j = 0; j < ni; ++j) hist[j].push_back(sup[j]);
      }
    }
  }

  auto key = [&](const std::vector<int>& idx) {
    std::string s = "C[a=";
    for (std::size_t v = 0; v < n; ++v) s += (v ? "," : "") + std::to_string(idx[v]);
    s += ";b=";
    for (std::size_t v = 0; v < n; ++v) s += (v ? "," : "") + std::to_string(idx[n + v]);
    return s + "]";
  };

  CheckReport rep;
  rep.condition = "sigma-membership";
  rep.samples = total;
  rep.seed = opts.seed;
  rep.verdict = Verdict::pass;
  std::size_t shown = 0;
  for (std::size_t j = 0; j < ni; ++j) {
    const Verdict v = doubling_verdict(hist[j]);
    rep.constants[key(indices[j])] = sup[j];
    if (v != Verdict::pass) {
      if (rep.verdict == Verdict::pass) shown = j;
      rep.notes.push_back(key(indices[j]) + ": " + std::string(to_string(v)));
      worst[j].label = key(indices[j]);
      rep.witnesses.push_back(worst[j]);
    }
    rep.verdict = combine(rep.verdict, v);
  }
  rep.history = hist[shown];
  rep.constants["m"] = m;
  rep.constants["q"] = q;
  rep.constants["fd_flags"] = static_cast<double>(flags);
  if (flags > 0) rep.notes.push_back("finite-difference step sweep never agreed within 10% at " +
                                     std::to_string(flags) + " evaluations");
  return rep;
}

}  // namespace anharm

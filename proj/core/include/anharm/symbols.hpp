#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anharm/expr.hpp"
#include "anharm/report.hpp"

namespace anharm {

/// A candidate tau-function Gamma on R^n with growth exponent tau.
///
/// Builtin kinds have closed forms: `even_power` is |x|^(2 tau) and `bracket`
/// is (1 + |x|^2)^tau. `perturbed` adds a user expression of lower growth to a
/// builtin; `expression` is a pure user expression. Expressions are evaluated
/// with both `x[i]` and `xi[i]` bound to the argument, so the same text works
/// for a potential and for a frequency multiplier.
class TauFunction {
 public:
  enum class Kind { even_power, bracket, perturbed, expression };

  static TauFunction even_power(double tau, int dim = 1);
  static TauFunction bracket(double tau, int dim = 1);
  static TauFunction perturbed(const TauFunction& base, Expression perturbation,
                               std::optional<double> q_floor = {});
  static TauFunction expression(Expression e, double tau, int dim = 1,
                                std::optional<double> q_floor = {});
  /// Gamma = 0, for multiplier-free or potential-free test operators.
  static TauFunction zero(double tau, int dim = 1);

  /// Throws EvaluationError on a non-finite value.
  double eval(std::span<const double> x) const;
  double eval(double x) const { return eval(std::span<const double>(&x, 1)); }
  /// Same as eval, without the finiteness check.
  double raw(std::span<const double> x) const noexcept;

  /// Value as a function of |x| for the radial kinds.
  double radial(double r) const noexcept;
  /// Largest r with radial(r) < level, for builtin kinds; nullopt otherwise.
  std::optional<double> radial_inverse(double level) const noexcept;

  Kind kind() const noexcept { return kind_; }
  double tau() const noexcept { return tau_; }
  int dim() const noexcept { return dim_; }
  double q_floor() const noexcept { return q_floor_; }
  bool is_builtin() const noexcept { return kind_ == Kind::even_power || kind_ == Kind::bracket; }
  /// Depends on |x| only. One-dimensional even functions count as radial.
  bool is_radial() const noexcept { return is_builtin() || (dim_ == 1 && even_); }
  /// Builtin kinds are even; expressions are tested on a coarse grid.
  bool is_even() const noexcept { return even_; }
  bool is_zero() const noexcept { return zero_; }

  std::string formula() const;

 private:
  TauFunction() = default;
  void finish(std::optional<double> q_floor);

  Kind kind_ = Kind::even_power;
  double tau_ = 1.0;
  int dim_ = 1;
  double q_floor_ = 1.0;
  bool even_ = true;
  bool zero_ = false;
  Kind base_kind_ = Kind::even_power;
  std::optional<Expression> expr_;
};

/// Smallest sampled value of Gamma on the coarse grid [-10, 10]^n.
double coarse_minimum(const TauFunction& f);

/// q = max(1, 1 - min(V + A)) + 1 with the minimum taken on the coarse grid.
double default_q(const TauFunction& A, const TauFunction& V);

/// Phase-space symbol a(x, xi), possibly complex.
struct PhaseSymbol {
  std::function<std::complex<double>(std::span<const double>, std::span<const double>)> fn;
  int dim = 1;
  double order = 0.0;
  std::string label;

  std::complex<double> operator()(std::span<const double> x, std::span<const double> xi) const {
    return fn(x, xi);
  }
  std::complex<double> at(double x, double xi) const {
    return fn(std::span<const double>(&x, 1), std::span<const double>(&xi, 1));
  }

  static PhaseSymbol from_expression(const Expression& e, int dim = 1, double order = 0.0);
  /// a(x, xi) = A(xi) + V(x).
  static PhaseSymbol split(const TauFunction& A, const TauFunction& V, double order = 1.0);
};

/// Sup over pairs |x|, |y| >= R of
/// |(q/2 + Gamma(x))^(1/2tau) - (q/2 + Gamma(y))^(1/2tau)| / |x - y|.
///
/// `sample_count` is the base size of the doubling plan. Constants reported:
/// `sup_ratio`, `C1` (= 1/sup_ratio), `R`, `q`.
CheckReport check_tau_lipschitz(const TauFunction& f, double q, double R,
                                std::uint64_t sample_count, std::uint64_t seed);

/// Search for Gamma(x) >= C1 |x|^(2 tau) on |x| >= C2. Constants: `C1`, `C2`.
CheckReport check_cstar(const TauFunction& f, std::uint64_t sample_count, std::uint64_t seed);

enum class FdStepRule { metric_adapted, absolute };

struct SigmaOptions {
  int max_order = 3;
  std::uint64_t sample_count = 2000;
  std::uint64_t seed = 1;
  FdStepRule step_rule = FdStepRule::metric_adapted;
  /// Relative step: h = rel_step * M^(1/2kappa) (x) or M^(1/2gamma) (xi).
  double rel_step = 1e-3;
  /// Defaults to default_q(A, V).
  std::optional<double> q;
};

/// Central-difference estimate of every C_{alpha beta} with
/// |alpha| + |beta| <= max_order. Each derivative starts at the rule's step h
/// and halves it until two successive estimates agree within 10%.
/// Constants are keyed `C[a=..;b=..]` with the xi multi-index first;
/// `fd_flags` counts derivatives whose sweep never settled.
CheckReport check_sigma_membership(const PhaseSymbol& a, const TauFunction& A,
                                   const TauFunction& V, double m, const SigmaOptions& opts = {});

}  // namespace anharm

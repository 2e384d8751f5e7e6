#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "anharm/operator_spec.hpp"
#include "anharm/quantize.hpp"
#include "anharm/spectrum.hpp"

namespace anharm {

/// (q + M)^(-nu) by spectral calculus. Throws ShiftTooSmallError when
/// q + lambda_min < 1.
OperatorMatrix negative_power(const OperatorMatrix& M, double q, double nu);

/// Descending singular values, the first `trusted` of which are reliable,
/// with a power law c k^(-alpha) fitted on the trusted tail.
struct SingularValueSeries {
  std::vector<double> values;
  std::size_t trusted = 0;
  std::string provenance;
  double c = 0.0;
  double alpha = 0.0;
  bool has_fit = false;

  /// Sorts descending; `trusted` defaults to all values.
  static SingularValueSeries from_values(std::vector<double> values, std::size_t trusted = SIZE_MAX,
                                         std::string provenance = "values");
  /// s_k = (q + lambda_k)^(-nu) over the trusted eigenvalues.
  static SingularValueSeries from_spectrum(const Spectrum& s, double q, double nu);
  static SingularValueSeries from_matrix(const ComplexMatrix& M);
};

/// Least-squares fit of log s_k = log c - alpha log k over k in [k0, k1], 1-based.
std::pair<double, double> fit_power_law(const std::vector<double>& s, std::size_t k0, std::size_t k1);

enum class SchattenMode { truncated, continued };

struct SchattenResult {
  /// sum_k s_k^r, including the continued tail in continued mode.
  double power_sum = 0.0;
  /// power_sum^(1/r).
  double norm = 0.0;
  double tail = 0.0;
  bool divergent = false;
};

/// Continued mode extends the fitted law c k^(-alpha) past the trusted
/// range; divergent when alpha r <= 1 + 1e-9.
SchattenResult schatten_norm(const SingularValueSeries& s, double r, SchattenMode mode);

enum class Membership { in, out, boundary, undetermined };

std::string_view to_string(Membership m) noexcept;

struct MembershipResult {
  Membership verdict = Membership::undetermined;
  /// Fitted decay exponent of s_k = (q + lambda_k)^(-nu).
  double alpha_fit = 0.0;
  /// r * alpha_fit; the continued sum converges iff this exceeds 1.
  double product = 0.0;
  /// mu0 / r.
  double threshold = 0.0;
  /// nu > mu0 / r.
  bool sufficient_condition = false;
  /// Verdict agrees with the sufficient condition (always true for BOUNDARY
  /// and UNDETERMINED).
  bool agrees = true;
};

/// Needs at least 100 trusted eigenvalues.
MembershipResult classify_membership(const OperatorSpec& spec, double r, double nu, const Spectrum& s);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};

nlohmann::json to_json(const IdentityCheck& c);

/// lhs = Re tr quantize_t(a), rhs = (2 pi)^(-1) times the grid sum of a.
/// Throws DomainTooSmallError when |a| on the box boundary exceeds 1e-10 max|a|.
IdentityCheck trace_identity_check(const PhaseSymbol& a, const Grid1D& grid, double t = 0.5);

/// lhs = Frobenius norm of quantize_t(a), rhs = (2 pi)^(-1/2) times the grid L2 norm of a.
IdentityCheck hs_identity_check(const PhaseSymbol& a, const Grid1D& grid, double t = 0.5);

}  // namespace anharm

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace anharm {

enum class Verdict { pass, fail, undetermined };

std::string_view to_string(Verdict v) noexcept;

/// Worst of two verdicts: fail > undetermined > pass.
Verdict combine(Verdict a, Verdict b) noexcept;

/// A point where an inequality was tight or violated.
struct Witness {
  std::string label;
  std::vector<double> point;
  double value = 0.0;
};

/// Outcome of a sampled inequality check. Used by both the symbol-class and
/// the metric-axiom checkers; `condition` names the inequality tested.
struct CheckReport {
  std::string condition;
  Verdict verdict = Verdict::undetermined;
  std::map<std::string, double> constants;
  std::vector<Witness> witnesses;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  /// Sup (or inf) estimate after each sample doubling, base first.
  std::vector<double> history;
  std::vector<std::string> notes;

  bool passed() const noexcept { return verdict == Verdict::pass; }
};

nlohmann::json to_json(const CheckReport& report);

}  // namespace anharm

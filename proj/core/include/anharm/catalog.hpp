#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "anharm/operator_spec.hpp"

namespace anharm {

struct BuiltinInfo {
  std::string name;
  std::string multiplier;
  std::string potential;
  double gamma;
  double kappa;
  int n;
};

std::vector<BuiltinInfo> list_builtins();

struct BuiltinParams {
  std::optional<double> q;
  /// Exponents of frac-rel-gamma; ignored by the other entries.
  double gamma = 1.5;
  double kappa = 1.0;
};

/// Throws std::invalid_argument for an unknown name.
OperatorSpec make_builtin(std::string_view name, const BuiltinParams& params = {});

nlohmann::json to_json(const BuiltinInfo& b);

}  // namespace anharm

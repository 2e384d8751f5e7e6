#include "anharm/catalog.hpp"

#include <stdexcept>

namespace anharm {

std::vector<BuiltinInfo> list_builtins() {
  return {
      {"harmonic-1d", "|xi|^2", "|x|^2", 1.0, 1.0, 1},
      {"quartic-1d", "|xi|^2", "|x|^4", 1.0, 2.0, 1},
      {"sixth-1d", "|xi|^2", "|x|^6", 1.0, 3.0, 1},
      {"frac-rel-1d", "<xi>", "<x>^2", 0.5, 1.0, 1},
      {"frac-rel-gamma", "<xi>^(2 gamma)", "<x>^(2 kappa)", 1.5, 1.0, 1},
      {"harmonic-2d", "|xi|^2", "|x|^2", 1.0, 1.0, 2},
  };
}

OperatorSpec make_builtin(std::string_view name, const BuiltinParams& p) {
  if (name == "harmonic-1d") {
    return OperatorSpec(TauFunction::even_power(1.0), TauFunction::even_power(1.0), p.q, std::string(name));
  }
  if (name == "quartic-1d") {
    return OperatorSpec(TauFunction::even_power(1.0), TauFunction::even_power(2.0), p.q, std::string(name));
  }
  if (name == "sixth-1d") {
    return OperatorSpec(TauFunction::even_power(1.0), TauFunction::even_power(3.0), p.q, std::string(name));
  }
  if (name == "frac-rel-1d") {
    return OperatorSpec(TauFunction::bracket(0.5), TauFunction::bracket(1.0), p.q, std::string(name));
  }
  if (name == "frac-rel-gamma") {
    return OperatorSpec(TauFunction::bracket(p.gamma), TauFunction::bracket(p.kappa), p.q, std::string(name));
  }
  if (name == "harmonic-2d") {
    return OperatorSpec(TauFunction::even_power(1.0, 2), TauFunction::even_power(1.0, 2), p.q, std::string(name));
  }
  throw std::invalid_argument("unknown builtin '" + std::string(name) + "'");
}

nlohmann::json to_json(const BuiltinInfo& b) {
  return {{"name", b.name}, {"multiplier", b.multiplier}, {"potential", b.potential},
          {"gamma", b.gamma}, {"kappa", b.kappa}, {"n", b.n}};
}

}  // namespace anharm

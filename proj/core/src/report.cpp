#include "anharm/report.hpp"

#include <cmath>

namespace anharm {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::undetermined: return "UNDETERMINED";
  }
  return "UNDETERMINED";
}

Verdict combine(Verdict a, Verdict b) noexcept {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::undetermined || b == Verdict::undetermined) return Verdict::undetermined;
  return Verdict::pass;
}

namespace {

// JSON has no infinity; non-finite numbers are written as strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json to_json(const CheckReport& report) {
  nlohmann::json j;
  j["condition"] = report.condition;
  j["verdict"] = std::string(to_string(report.verdict));
  nlohmann::json constants = nlohmann::json::object();
  for (const auto& [k, v] : report.constants) constants[k] = number(v);
  j["constants"] = constants;
  nlohmann::json witnesses = nlohmann::json::array();
  for (const auto& w : report.witnesses) {
    nlohmann::json p = nlohmann::json::array();
    for (double c : w.point) p.push_back(number(c));
    witnesses.push_back({{"label", w.label}, {"point", p}, {"value", number(w.value)}});
  }
  j["witnesses"] = witnesses;
  j["samples"] = report.samples;
  j["seed"] = report.seed;
  nlohmann::json history = nlohmann::json::array();
  for (double h : report.history) history.push_back(number(h));
  j["history"] = history;
  j["notes"] = report.notes;
  return j;
}

}  // namespace anharm

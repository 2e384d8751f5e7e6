#include "anharm/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "anharm/catalog.hpp"
#include "anharm/errors.hpp"
#include "anharm/expr.hpp"
#include "anharm/symbols.hpp"

namespace anharm::cli {
namespace {

constexpr std::pair<Kind, std::string_view> kKindNames[] = {
    {Kind::check_metric, "check-metric"},       {Kind::check_symbols, "check-symbols"},
    {Kind::spectrum, "spectrum"},               {Kind::growth, "growth"},
    {Kind::schatten_scan, "schatten-scan"},     {Kind::phasespace_scan, "phasespace-scan"},
    {Kind::identities, "identities"},           {Kind::report_all, "report-all"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_double(std::string_view s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_u64(std::string_view s) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size() || t.empty()) return std::nullopt;
  return v;
}

std::optional<std::vector<double>> to_list(std::string_view s) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(s)};
  while (std::getline(in, item, ',')) {
    const auto v = to_double(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

// One handler per accepted key; each returns an error text or empty.
using Setter = std::function<std::string(ExperimentConfig&, const std::string&)>;

template <class T>
Setter number(T ExperimentConfig::*section_ptr, auto member, bool positive = false) {
  return [=](ExperimentConfig& c, const std::string& v) -> std::string {
    auto& slot = (c.*section_ptr).*member;
    using Slot = std::decay_t<decltype(slot)>;
    if constexpr (std::is_same_v<Slot, std::uint64_t> || std::is_same_v<Slot, std::size_t> ||
                  std::is_same_v<Slot, std::optional<std::size_t>>) {
      const auto u = to_u64(v);
      if (!u || (positive && *u == 0)) return "expected a positive integer";
      slot = static_cast<std::size_t>(*u);
    } else if constexpr (std::is_same_v<Slot, int> || std::is_same_v<Slot, std::optional<int>>) {
      const auto u = to_u64(v);
      if (!u || (positive && *u == 0) || *u > 1'000'000) return "expected a positive integer";
      slot = static_cast<int>(*u);
    } else if constexpr (std::is_same_v<Slot, std::vector<double>>) {
      const auto l = to_list(v);
      if (!l) return "expected a comma-separated list of numbers";
      slot = *l;
    } else if constexpr (std::is_same_v<Slot, std::string> ||
                         std::is_same_v<Slot, std::optional<std::string>>) {
      if (trim(v).empty()) return "expected a non-empty value";
      slot = trim(v);
    } else {
      const auto d = to_double(v);
      if (!d || (positive && !(*d > 0.0))) return positive ? "expected a positive number" : "expected a number";
      slot = *d;
    }
    return {};
  };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  using C = ExperimentConfig;
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"experiment",
       {{"kind",
         [](C& c, const std::string& v) -> std::string {
           c.kind = parse_kind(trim(v));
           return c.kind ? "" : "unknown kind '" + trim(v) + "'";
         }},
        {"seed",
         [](C& c, const std::string& v) -> std::string {
           const auto u = to_u64(v);
           if (!u) return "expected an unsigned 64-bit integer";
           c.seed = *u;
           return {};
         }},
        {"out",
         [](C& c, const std::string& v) -> std::string {
           if (trim(v).empty()) return "expected a path";
           c.out = trim(v);
           return {};
         }}}},
      {"operator",
       {{"builtin", number(&C::op, &OperatorConfig::builtin)},
        {"multiplier", number(&C::op, &OperatorConfig::multiplier)},
        {"potential", number(&C::op, &OperatorConfig::potential)},
        {"gamma", number(&C::op, &OperatorConfig::gamma, true)},
        {"kappa", number(&C::op, &OperatorConfig::kappa, true)},
        {"n", number(&C::op, &OperatorConfig::n, true)},
        {"q", number(&C::op, &OperatorConfig::q)}}},
      {"grid",
       {{"L", number(&C::grid, &GridConfig::L, true)},
        {"N", number(&C::grid, &GridConfig::N, true)},
        {"target", number(&C::grid, &GridConfig::target, true)}}},
      {"check-metric",
       {{"trials", number(&C::metric, &MetricConfig::trials, true)},
        {"doublings", number(&C::metric, &MetricConfig::doublings)},
        {"n_max", number(&C::metric, &MetricConfig::n_max)}}},
      {"check-symbols",
       {{"samples", number(&C::symbols, &SymbolsConfig::samples, true)},
        {"max_order", number(&C::symbols, &SymbolsConfig::max_order)},
        {"m", number(&C::symbols, &SymbolsConfig::m)},
        {"R", number(&C::symbols, &SymbolsConfig::R, true)}}},
      {"spectrum",
       {{"j_min", number(&C::spectrum, &SpectrumConfig::j_min, true)},
        {"j_max", number(&C::spectrum, &SpectrumConfig::j_max, true)}}},
      {"growth",
       {{"r", number(&C::growth, &GrowthConfig::r, true)},
        {"L_list", number(&C::growth, &GrowthConfig::L_list)}}},
      {"schatten-scan",
       {{"r_list", number(&C::schatten, &SchattenConfig::r_list)},
        {"nu_factors", number(&C::schatten, &SchattenConfig::nu_factors)}}},
      {"phasespace-scan",
       {{"mu_offsets", number(&C::phasespace, &PhasespaceConfig::mu_offsets)},
        {"mu_list", number(&C::phasespace, &PhasespaceConfig::mu_list)},
        {"radii", number(&C::phasespace, &PhasespaceConfig::radii)}}},
      {"identities",
       {{"symbol", number(&C::identities, &IdentitiesConfig::symbol)},
        {"L", number(&C::identities, &IdentitiesConfig::L, true)},
        {"N", number(&C::identities, &IdentitiesConfig::N, true)},
        {"t_list", number(&C::identities, &IdentitiesConfig::t_list)}}},
  };
  return s;
}

std::string join(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& l : lines) out += "\n  " + l;
  return out;
}

bool is_parametric(const std::string& name) { return name == "frac-rel-gamma"; }

}  // namespace

std::string_view to_string(Kind k) noexcept {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<Kind> parse_kind(std::string_view text) noexcept {
  for (const auto& [kind, name] : kKindNames) {
    if (name == text) return kind;
  }
  return std::nullopt;
}

std::vector<Kind> single_kinds() {
  return {Kind::check_metric, Kind::check_symbols, Kind::spectrum,  Kind::growth,
          Kind::schatten_scan, Kind::phasespace_scan, Kind::identities};
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }

  ExperimentConfig cfg;
  std::vector<std::string> problems;
  if (tree.empty()) problems.emplace_back("config is empty");

  for (const auto& [section, body] : tree) {
    const auto sec = schema().find(section);
    if (body.empty()) {
      problems.push_back("'" + section + "': key outside any section");
      continue;
    }
    if (sec == schema().end()) {
      problems.push_back("[" + section + "]: unknown section");
      continue;
    }
    for (const auto& [key, value] : body) {
      const auto setter = sec->second.find(key);
      if (setter == sec->second.end()) {
        problems.push_back(section + "." + key + ": unknown key");
        continue;
      }
      const std::string err = setter->second(cfg, value.data());
      if (!err.empty()) problems.push_back(section + "." + key + ": " + err);
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open '" + path.string() + "'"});
  return parse_config(in);
}

void validate(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  if (!cfg.kind) problems.emplace_back("experiment.kind: required");
  const auto& op = cfg.op;
  const bool needs_operator = cfg.kind && *cfg.kind != Kind::identities;
  if (op.builtin) {
    const auto names = list_builtins();
    if (std::none_of(names.begin(), names.end(), [&](const BuiltinInfo& b) { return b.name == *op.builtin; })) {
      problems.push_back("operator.builtin: unknown builtin '" + *op.builtin + "'");
    } else if (!is_parametric(*op.builtin) && (op.gamma || op.kappa)) {
      problems.push_back("operator.gamma/kappa: only frac-rel-gamma takes exponents");
    }
    if (op.multiplier || op.potential) {
      problems.emplace_back("operator.multiplier/potential: not allowed together with a builtin");
    }
    if (op.n != 1) problems.emplace_back("operator.n: implied by the builtin");
  } else if (needs_operator) {
    if (!op.multiplier) problems.emplace_back("operator.multiplier: required without a builtin");
    if (!op.potential) problems.emplace_back("operator.potential: required without a builtin");
    if (!op.gamma) problems.emplace_back("operator.gamma: required without a builtin");
    if (!op.kappa) problems.emplace_back("operator.kappa: required without a builtin");
    if (op.n < 1 || op.n > 2) problems.emplace_back("operator.n: must be 1 or 2");
  }
  if (cfg.grid.N && (*cfg.grid.N < 8 || *cfg.grid.N % 2 != 0)) {
    problems.emplace_back("grid.N: must be even and at least 8");
  }
  if (cfg.symbols.max_order < 0 || cfg.symbols.max_order > 4) {
    problems.emplace_back("check-symbols.max_order: must be in 0..4");
  }
  if (cfg.metric.doublings < 0 || cfg.metric.doublings > 10) {
    problems.emplace_back("check-metric.doublings: must be in 0..10");
  }
  if (cfg.metric.trials < 1000) problems.emplace_back("check-metric.trials: must be at least 1000");
  if (cfg.identities.N < 8 || cfg.identities.N % 2 != 0) {
    problems.emplace_back("identities.N: must be even and at least 8");
  }
  for (double r : cfg.schatten.r_list) {
    if (!(r >= 1.0)) problems.emplace_back("schatten-scan.r_list: entries must be at least 1");
  }
  for (double f : cfg.schatten.nu_factors) {
    if (!(f > 0.0)) problems.emplace_back("schatten-scan.nu_factors: entries must be positive");
  }
  for (double L : cfg.growth.L_list) {
    if (!(L > 0.0)) problems.emplace_back("growth.L_list: entries must be positive");
  }
  for (double mu : cfg.phasespace.mu_list) {
    if (!(mu > 0.0)) problems.emplace_back("phasespace-scan.mu_list: entries must be positive");
  }
  if (cfg.kind && (*cfg.kind == Kind::identities || *cfg.kind == Kind::report_all)) {
    try {
      const Expression e = Expression::parse(cfg.identities.symbol);
      if (e.max_index() > 0) problems.emplace_back("identities.symbol: one-dimensional symbols only");
    } catch (const ParseError& err) {
      problems.push_back(std::string("identities.symbol: ") + err.what());
    }
  }
  const auto& radii = cfg.phasespace.radii;
  if (!radii.empty() && (radii.size() < 3 || !std::is_sorted(radii.begin(), radii.end()) ||
                         std::adjacent_find(radii.begin(), radii.end()) != radii.end())) {
    problems.emplace_back("phasespace-scan.radii: need at least 3 increasing entries");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

OperatorSpec make_operator(const ExperimentConfig& cfg) {
  const auto& op = cfg.op;
  if (op.builtin) {
    BuiltinParams p;
    p.q = op.q;
    if (op.gamma) p.gamma = *op.gamma;
    if (op.kappa) p.kappa = *op.kappa;
    return make_builtin(*op.builtin, p);
  }
  std::vector<std::string> problems;
  auto parse = [&](const std::string& key, const std::string& text) -> std::optional<Expression> {
    try {
      Expression e = Expression::parse(text);
      if (e.max_index() >= op.n) {
        problems.push_back("operator." + key + ": index out of range for n=" + std::to_string(op.n));
      }
      return e;
    } catch (const ParseError& e) {
      problems.push_back("operator." + key + ": " + e.what());
      return std::nullopt;
    }
  };
  auto A = parse("multiplier", *op.multiplier);
  auto V = parse("potential", *op.potential);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  try {
    return OperatorSpec(TauFunction::expression(*A, *op.gamma, op.n),
                        TauFunction::expression(*V, *op.kappa, op.n), op.q, "custom");
  } catch (const std::invalid_argument& e) {
    throw ConfigError({std::string("operator: ") + e.what()});
  }
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  auto opt = [](const auto& o) -> nlohmann::json {
    if (o) return *o;
    return nullptr;
  };
  return {
      {"kind", cfg.kind ? std::string(to_string(*cfg.kind)) : std::string()},
      {"seed", cfg.seed},
      {"operator",
       {{"builtin", opt(cfg.op.builtin)},
        {"multiplier", opt(cfg.op.multiplier)},
        {"potential", opt(cfg.op.potential)},
        {"gamma", opt(cfg.op.gamma)},
        {"kappa", opt(cfg.op.kappa)},
        {"n", cfg.op.n},
        {"q", opt(cfg.op.q)}}},
      {"grid", {{"L", opt(cfg.grid.L)}, {"N", opt(cfg.grid.N)}, {"target", opt(cfg.grid.target)}}},
      {"check-metric",
       {{"trials", cfg.metric.trials}, {"doublings", cfg.metric.doublings}, {"n_max", opt(cfg.metric.n_max)}}},
      {"check-symbols",
       {{"samples", cfg.symbols.samples},
        {"max_order", cfg.symbols.max_order},
        {"m", cfg.symbols.m},
        {"R", cfg.symbols.R}}},
      {"spectrum", {{"j_min", opt(cfg.spectrum.j_min)}, {"j_max", opt(cfg.spectrum.j_max)}}},
      {"growth", {{"r", opt(cfg.growth.r)}, {"L_list", cfg.growth.L_list}}},
      {"schatten-scan", {{"r_list", cfg.schatten.r_list}, {"nu_factors", cfg.schatten.nu_factors}}},
      {"phasespace-scan",
       {{"mu_offsets", cfg.phasespace.mu_offsets},
        {"mu_list", cfg.phasespace.mu_list},
        {"radii", cfg.phasespace.radii}}},
      {"identities",
       {{"symbol", cfg.identities.symbol},
        {"L", cfg.identities.L},
        {"N", cfg.identities.N},
        {"t_list", cfg.identities.t_list}}},
  };
}

}  // namespace anharm::cli

#include "anharm/cli/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <thread>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "anharm/catalog.hpp"
#include "anharm/errors.hpp"
#include "anharm/metric.hpp"
#include "anharm/phasespace.hpp"
#include "anharm/quantize.hpp"
#include "anharm/schatten.hpp"
#include "anharm/spectrum.hpp"
#include "anharm/symbols.hpp"

#ifndef ANHARM_VERSION
#define ANHARM_VERSION "0.0.0"
#endif

namespace anharm::cli {
namespace fs = std::filesystem;

namespace {

constexpr double kGrowthTolerance = 0.05;
constexpr double kIdentityTolerance = 1e-3;
constexpr double kThresholdBand = 0.05;

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, std::string_view header) : out_(path) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format17(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(std::string_view v) { return std::string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }

  std::ofstream out_;
};

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

Grid1D choose_grid(const OperatorSpec& spec, const ExperimentConfig& cfg) {
  const int N = cfg.grid.N.value_or(spec.n() == 1 ? 2048 : 48);
  if (cfg.grid.L) return Grid1D(*cfg.grid.L, N);
  return suggest_grid(spec, N, cfg.grid.target.value_or(spec.n() == 1 ? 150 : 40));
}

Spectrum compute_spectrum(const OperatorSpec& spec, const ExperimentConfig& cfg) {
  const OperatorMatrix M = assemble_split(spec, choose_grid(spec, cfg));
  EigensolveOptions opts;
  opts.seed = cfg.seed;
  return eigensolve(M, opts);
}

MetricOptions metric_options(const ExperimentConfig& cfg) {
  MetricOptions o;
  o.trials = cfg.metric.trials;
  o.doublings = cfg.metric.doublings;
  o.seed = cfg.seed;
  return o;
}

void check_metric(const ExperimentConfig& cfg, ExperimentResult& res) {
  const OperatorSpec spec = make_operator(cfg);
  const MetricOptions o = metric_options(cfg);
  const CheckReport slow = check_slowness(spec, o);
  const CheckReport temp = cfg.metric.n_max ? check_temperateness(spec, *cfg.metric.n_max, o)
                                            : check_temperateness(spec, o);
  const GWeightReport gw = check_gweight(spec, o);
  const CheckReport unc = check_uncertainty(spec, o);

  res.verdict = combine(combine(slow.verdict, temp.verdict), combine(gw.verdict, unc.verdict));
  res.summary = {{"operator", spec.label()},
                 {"q", spec.q()},
                 {"verdict", to_string(res.verdict)},
                 {"slowness", to_json(slow)},
                 {"temperateness", to_json(temp)},
                 {"gweight",
                  {{"verdict", to_string(gw.verdict)},
                   {"continuity", to_json(gw.continuity)},
                   {"temperateness", to_json(gw.temperateness)}}},
                 {"uncertainty", to_json(unc)}};
  res.files.push_back(res.dir / "metric.json");
  write_json(res.files.back(), res.summary);
}

void check_symbols(const ExperimentConfig& cfg, ExperimentResult& res) {
  const OperatorSpec spec = make_operator(cfg);
  const auto& sc = cfg.symbols;
  Verdict v = Verdict::pass;
  nlohmann::json out = {{"operator", spec.label()}, {"q", spec.q()}};

  auto tau_checks = [&](const TauFunction& f, const std::string& name) {
    if (f.is_zero()) return;
    const CheckReport lip = check_tau_lipschitz(f, spec.q(), sc.R, sc.samples, cfg.seed);
    const CheckReport cs = check_cstar(f, sc.samples, cfg.seed);
    v = combine(v, combine(lip.verdict, cs.verdict));
    out[name] = {{"lipschitz", to_json(lip)}, {"cstar", to_json(cs)}};
  };
  tau_checks(spec.A(), "multiplier");
  tau_checks(spec.V(), "potential");

  SigmaOptions so;
  so.max_order = sc.max_order;
  so.sample_count = sc.samples;
  so.seed = cfg.seed;
  so.q = spec.q();
  const CheckReport sigma = check_sigma_membership(PhaseSymbol::split(spec.A(), spec.V()), spec.A(),
                                                   spec.V(), sc.m, so);
  v = combine(v, sigma.verdict);
  out["sigma"] = to_json(sigma);

  res.verdict = v;
  out["verdict"] = to_string(v);
  res.summary = out;
  res.files.push_back(res.dir / "symbols.json");
  write_json(res.files.back(), out);
}

void spectrum_kind(const ExperimentConfig& cfg, ExperimentResult& res) {
  const OperatorSpec spec = make_operator(cfg);
  const Spectrum s = compute_spectrum(spec, cfg);
  const double predicted = predicted_exponent(spec.n(), spec.kappa(), spec.gamma());

  res.files.push_back(res.dir / "spectrum.csv");
  write_spectrum_csv(s, res.files.back());

  nlohmann::json out = {{"operator", spec.label()},
                        {"q", spec.q()},
                        {"spectrum", to_json(s)},
                        {"predicted_alpha", predicted},
                        {"tolerance", kGrowthTolerance}};
  try {
    const GrowthFit fit = (cfg.spectrum.j_min || cfg.spectrum.j_max)
                              ? fit_growth_exponent(s, cfg.spectrum.j_min.value_or(20),
                                                    cfg.spectrum.j_max.value_or(std::min<std::size_t>(150, s.trust_cutoff)))
                              : fit_growth_exponent(s);
    out["fit"] = {{"alpha", fit.alpha}, {"r2", fit.r2}, {"log_c", fit.log_c},
                  {"j_min", fit.j_min}, {"j_max", fit.j_max}};
    res.verdict = std::abs(fit.alpha - predicted) <= kGrowthTolerance ? Verdict::pass : Verdict::fail;
  } catch (const FitError& e) {
    out["fit"] = nullptr;
    out["note"] = e.what();
    res.verdict = Verdict::undetermined;
  }
  out["verdict"] = to_string(res.verdict);
  res.summary = out;
  res.files.push_back(res.dir / "spectrum.json");
  write_json(res.files.back(), out);
}

void growth_kind(const ExperimentConfig& cfg, ExperimentResult& res) {
  const OperatorSpec spec = make_operator(cfg);
  const Spectrum s = compute_spectrum(spec, cfg);
  const double r = cfg.growth.r.value_or(2.0 / predicted_exponent(spec.n(), spec.kappa(), spec.gamma()));
  const CheckReport rep = certify_growth_bound(s, r, cfg.growth.L_list);

  res.files.push_back(res.dir / "growth.csv");
  {
    CsvWriter csv(res.files.back(), "L,L0,found");
    for (double L : cfg.growth.L_list) {
      const auto L0 = growth_bound_start(s, r, L);
      csv.row(L, L0 ? std::to_string(*L0) : std::string(), L0.has_value());
    }
  }
  res.verdict = rep.verdict;
  res.summary = {{"operator", spec.label()},
                 {"r", r},
                 {"trust_cutoff", s.trust_cutoff},
                 {"report", to_json(rep)},
                 {"verdict", to_string(rep.verdict)}};
  res.files.push_back(res.dir / "growth.json");
  write_json(res.files.back(), res.summary);
}

void schatten_kind(const ExperimentConfig& cfg, ExperimentResult& res) {
  const OperatorSpec spec = make_operator(cfg);
  const Spectrum s = compute_spectrum(spec, cfg);
  const double mu0 = threshold_mu0(spec.n(), spec.kappa(), spec.gamma());

  bool any_disagree = false;
  bool any_undetermined = false;
  nlohmann::json rows = nlohmann::json::array();
  res.files.push_back(res.dir / "schatten.csv");
  {
    CsvWriter csv(res.files.back(), "kappa,gamma,n,r,nu,threshold,alpha_fit,product,verdict,sufficient,agrees");
    for (double r : cfg.schatten.r_list) {
      for (double f : cfg.schatten.nu_factors) {
        const double nu = f * mu0 / r;
        const MembershipResult m = classify_membership(spec, r, nu, s);
        csv.row(spec.kappa(), spec.gamma(), spec.n(), r, nu, m.threshold, m.alpha_fit, m.product, to_string(m.verdict), m.sufficient_condition,
                m.agrees);
        any_disagree |= !m.agrees;
        any_undetermined |= m.verdict == Membership::undetermined;
        rows.push_back({{"r", r},
                        {"nu", nu},
                        {"threshold", m.threshold},
                        {"alpha_fit", m.alpha_fit},
                        {"product", m.product},
                        {"verdict", to_string(m.verdict)},
                        {"sufficient_condition", m.sufficient_condition},
                        {"agrees", m.agrees}});
      }
    }
  }
  res.verdict = any_disagree ? Verdict::fail : any_undetermined ? Verdict::undetermined : Verdict::pass;
  res.summary = {{"operator", spec.label()},
                 {"q", spec.q()},
                 {"mu0", mu0},
                 {"trust_cutoff", s.trust_cutoff},
                 {"rows", rows},
                 {"verdict", to_string(res.verdict)}};
  res.files.push_back(res.dir / "schatten.json");
  write_json(res.files.back(), res.summary);
}

void phasespace_kind(const ExperimentConfig& cfg, ExperimentResult& res) {
  const OperatorSpec spec = make_operator(cfg);
  const double mu0 = threshold_mu0(spec.n(), spec.kappa(), spec.gamma());
  std::vector<double> mus = cfg.phasespace.mu_list;
  if (mus.empty()) {
    for (double off : cfg.phasespace.mu_offsets) mus.push_back(mu0 * (1.0 + off));
  }
  const auto scan = scan_threshold(spec, mus, cfg.phasespace.radii);

  Verdict v = Verdict::pass;
  nlohmann::json rows = nlohmann::json::array();
  res.files.push_back(res.dir / "phasespace.csv");
  {
    CsvWriter csv(res.files.back(), "mu,radius,partial,slope,verdict");
    for (const auto& [mu, r] : scan) {
      for (std::size_t i = 0; i < r.radii.size(); ++i) {
        const std::string slope = i >= 1 && i - 1 < r.slopes.size() ? format17(r.slopes[i - 1]) : std::string();
        csv.row(mu, r.radii[i], r.partials[i], slope, to_string(r.verdict));
      }
      const bool in_band = std::abs(mu - mu0) <= kThresholdBand;
      const auto expected = mu > mu0 ? IntegralVerdict::convergent : IntegralVerdict::divergent;
      if (!in_band) {
        if (r.verdict == IntegralVerdict::undetermined) {
          v = combine(v, Verdict::undetermined);
        } else if (r.verdict != expected) {
          v = Verdict::fail;
        }
      }
      rows.push_back({{"mu", mu},
                      {"verdict", to_string(r.verdict)},
                      {"expected", in_band ? "band" : to_string(expected)},
                      {"value", std::isfinite(r.value) ? nlohmann::json(r.value) : nlohmann::json("inf")},
                      {"tail_slope", r.tail_slope}});
    }
  }
  res.verdict = v;
  res.summary = {{"operator", spec.label()},
                 {"q", spec.q()},
                 {"mu0", mu0},
                 {"band", kThresholdBand},
                 {"rows", rows},
                 {"verdict", to_string(v)}};
  res.files.push_back(res.dir / "phasespace.json");
  write_json(res.files.back(), res.summary);
}

void identities_kind(const ExperimentConfig& cfg, ExperimentResult& res) {
  const auto& ic = cfg.identities;
  Expression e = [&] {
    try {
      return Expression::parse(ic.symbol);
    } catch (const ParseError& err) {
      throw ConfigError({std::string("identities.symbol: ") + err.what()});
    }
  }();
  const PhaseSymbol a = PhaseSymbol::from_expression(e, 1, 0.0);
  const Grid1D grid(ic.L, ic.N);

  const bool has_weyl = std::find(ic.t_list.begin(), ic.t_list.end(), 0.5) != ic.t_list.end();
  Verdict v = Verdict::pass;
  nlohmann::json rows = nlohmann::json::array();
  res.files.push_back(res.dir / "identities.csv");
  {
    CsvWriter csv(res.files.back(), "t,trace_lhs,trace_rhs,trace_rel_err,hs_lhs,hs_rhs,hs_rel_err");
    for (double t : ic.t_list) {
      const IdentityCheck tr = trace_identity_check(a, grid, t);
      const IdentityCheck hs = hs_identity_check(a, grid, t);
      csv.row(t, tr.lhs, tr.rhs, tr.rel_err, hs.lhs, hs.rhs, hs.rel_err);
      const bool graded = !has_weyl || t == 0.5;
      if (graded && !(tr.rel_err <= kIdentityTolerance && hs.rel_err <= kIdentityTolerance)) v = Verdict::fail;
      rows.push_back({{"t", t}, {"graded", graded}, {"trace", to_json(tr)}, {"hs", to_json(hs)}});
    }
  }
  res.verdict = v;
  res.summary = {{"symbol", ic.symbol},
                 {"L", ic.L},
                 {"N", ic.N},
                 {"tolerance", kIdentityTolerance},
                 {"rows", rows},
                 {"verdict", to_string(v)}};
  res.files.push_back(res.dir / "identities.json");
  write_json(res.files.back(), res.summary);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json versions() {
  return {{"anharm", ANHARM_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                        "." + std::to_string(BOOST_VERSION % 100)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

ExperimentResult guarded(const ExperimentConfig& cfg, Kind kind, const fs::path& dir) {
  try {
    return run_experiment(cfg, kind, dir);
  } catch (const std::exception& e) {
    ExperimentResult r;
    r.kind = kind;
    r.dir = dir;
    r.verdict = Verdict::undetermined;
    r.error = std::string(to_string(kind)) + ": " + e.what();
    return r;
  }
}

}  // namespace

bool RunResult::computation_error() const noexcept {
  for (const auto& e : experiments) {
    if (e.error) return true;
  }
  return false;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, Kind kind, const fs::path& dir) {
  ExperimentResult res;
  res.kind = kind;
  res.dir = dir;
  fs::create_directories(dir);
  switch (kind) {
    case Kind::check_metric: check_metric(cfg, res); break;
    case Kind::check_symbols: check_symbols(cfg, res); break;
    case Kind::spectrum: spectrum_kind(cfg, res); break;
    case Kind::growth: growth_kind(cfg, res); break;
    case Kind::schatten_scan: schatten_kind(cfg, res); break;
    case Kind::phasespace_scan: phasespace_kind(cfg, res); break;
    case Kind::identities: identities_kind(cfg, res); break;
    case Kind::report_all: throw std::invalid_argument("run_experiment: report-all is not a single experiment");
  }
  return res;
}

RunResult run(const ExperimentConfig& cfg, const fs::path& out_dir, const RunOptions& opts) {
  validate(cfg);
  if (*cfg.kind != Kind::identities) make_operator(cfg);  // surface expression errors before any work

  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  RunResult rr;
  rr.out_dir = out_dir;
  fs::create_directories(out_dir);

  if (*cfg.kind == Kind::report_all) {
    const auto kinds = single_kinds();
    rr.experiments.resize(kinds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < kinds.size(); i = next++) {
        rr.experiments[i] = guarded(cfg, kinds[i], out_dir / std::string(to_string(kinds[i])));
      }
    };
    const int threads = std::clamp(opts.parallel, 1, static_cast<int>(kinds.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
  } else {
    rr.experiments.push_back(guarded(cfg, *cfg.kind, out_dir));
  }

  rr.verdict = Verdict::pass;
  for (const auto& e : rr.experiments) rr.verdict = combine(rr.verdict, e.verdict);
  rr.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const nlohmann::json config = to_json(cfg);
  nlohmann::json exps = nlohmann::json::array();
  for (const auto& e : rr.experiments) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : e.files) {
      files.push_back({{"path", fs::relative(f, out_dir).generic_string()}, {"sha256", sha256_file(f)}});
    }
    exps.push_back({{"kind", to_string(e.kind)},
                    {"verdict", to_string(e.verdict)},
                    {"error", e.error ? nlohmann::json(*e.error) : nlohmann::json(nullptr)},
                    {"files", files}});
  }
  const nlohmann::json manifest = {{"tool", "anharm"},
                                   {"kind", to_string(*cfg.kind)},
                                   {"config", config},
                                   {"config_sha256", sha256_hex(config.dump())},
                                   {"seed", cfg.seed},
                                   {"versions", versions()},
                                   {"started_at", started},
                                   {"wall_time_s", rr.wall_time_s},
                                   {"verdict", to_string(rr.verdict)},
                                   {"computation_error", rr.computation_error()},
                                   {"experiments", exps}};
  rr.manifest = out_dir / "manifest.json";
  write_json(rr.manifest, manifest);
  return rr;
}

int exit_code(const RunResult& r) noexcept {
  if (r.computation_error()) return kExitComputation;
  switch (r.verdict) {
    case Verdict::pass: return kExitPass;
    case Verdict::fail: return kExitFail;
    case Verdict::undetermined: return kExitUndetermined;
  }
  return kExitUndetermined;
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path resolve_output_dir(const fs::path& out) {
  if (out.is_absolute()) return out;
  if (const char* root = std::getenv("ANHARM_DATA_DIR"); root && *root) return fs::path(root) / out;
  return out;
}

}  // namespace anharm::cli

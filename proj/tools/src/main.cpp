// anharm: runs experiments on Schroedinger-type operators q + A(D) + V(x).
//
// Exit codes: 0 every verdict PASS, 1 some FAIL, 2 some UNDETERMINED,
// 3 usage or configuration error, 4 computation error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "anharm/catalog.hpp"
#include "anharm/cli/config.hpp"
#include "anharm/cli/experiment.hpp"

namespace cli = anharm::cli;

int main(int argc, char** argv) {
  CLI::App app{"Experiment runner for q + A(D) + V(x)"};
  std::optional<std::string> config_path;
  std::optional<std::string> kind;
  std::optional<std::string> builtin;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int parallel = 1;
  bool list = false;

  app.add_option("--config", config_path, "INI experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--kind", kind,
                 "check-metric | check-symbols | spectrum | growth | schatten-scan | "
                 "phasespace-scan | identities | report-all");
  app.add_option("--builtin", builtin, "builtin operator pair (see --list-builtins)");
  app.add_option("--out", out, "output directory (relative paths resolve under ANHARM_DATA_DIR)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--parallel", parallel, "worker threads for report-all")->check(CLI::Range(1, 64));
  app.add_flag("--list-builtins", list, "print the builtin catalog as JSON and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (list) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& b : anharm::list_builtins()) j.push_back(anharm::to_json(b));
    std::cout << j.dump(2) << '\n';
    return cli::kExitPass;
  }

  try {
    cli::ExperimentConfig cfg;
    if (config_path) cfg = cli::load_config(*config_path);
    if (kind) {
      cfg.kind = cli::parse_kind(*kind);
      if (!cfg.kind) throw cli::ConfigError({"--kind: unknown kind '" + *kind + "'"});
    }
    if (builtin) {
      cfg.op.builtin = *builtin;
      cfg.op.multiplier.reset();
      cfg.op.potential.reset();
      cfg.op.n = 1;
    }
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;

    const auto dir = cli::resolve_output_dir(cfg.out);
    const cli::RunResult result = cli::run(cfg, dir, {parallel});
    for (const auto& e : result.experiments) {
      std::cout << cli::to_string(e.kind) << ": " << anharm::to_string(e.verdict) << "  ("
                << e.dir.string() << ")\n";
      if (e.error) std::cerr << "error: " << *e.error << '\n';
    }
    std::cout << "overall: " << anharm::to_string(result.verdict) << "  manifest "
              << result.manifest.string() << '\n';
    return cli::exit_code(result);
  } catch (const cli::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitComputation;
  }
}

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rmkac/config.hpp"
#include "rmkac/parallel.hpp"
#include "rmkac/runner.hpp"

namespace {

constexpr const char* kThreadsEnv = "RMKAC_THREADS";

}  // namespace

int main(int argc, char** argv) {
  using namespace rmkac;
  CLI::App app{"Monte Carlo experiments for random-matrix Kac models"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int threads = -1;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment configuration (YAML)")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed, overrides the config");
  app.add_option("--out", out_dir, "output directory, overrides the config");
  app.add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", quiet, "no progress output");
  app.require_subcommand(0, 1);
  std::vector<std::string> names{"verify", "stationary", "transient", "rate",     "tails",
                                 "explosion", "regularity", "symmetry", "all"};
  for (const auto& n : names) app.add_subcommand(n, fmt::format("run the {} experiment", n));
  app.add_subcommand("validate", "check the configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  if (threads < 0) {
    if (const char* env = std::getenv(kThreadsEnv)) {
      try {
        threads = std::stoi(env);
      } catch (...) {
        std::cerr << fmt::format("ignoring {}={}: not a number\n", kThreadsEnv, env);
      }
      if (threads >= 0 && !quiet) std::cerr << fmt::format("[rmkac] thread count {} from {}\n", threads, kThreadsEnv);
    }
  }
  set_thread_count(std::max(threads, 0));

  std::vector<ConfigDiagnostic> notices;
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path, &notices);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitInvalidConfig;
  }
  if (!quiet)
    for (const auto& n : notices) std::cerr << "[rmkac] " << n.str() << "\n";

  std::string sub;
  if (!app.get_subcommands().empty()) sub = app.get_subcommands().front()->get_name();
  if (sub == "validate") {
    std::cout << "configuration is valid\n";
    return 0;
  }
  if (!sub.empty()) cfg.experiment = *parse_experiment(sub);

  RunOptions opt;
  if (!out_dir.empty()) opt.out_dir = out_dir;
  opt.seed = seed;
  opt.quiet = quiet;
  try {
    RunManifest m = run(cfg, opt);
    if (!quiet) {
      for (auto it = m.verdicts.begin(); it != m.verdicts.end(); ++it)
        std::cerr << fmt::format("[rmkac] {}: {}\n", it.key(), it.value().get<std::string>());
      std::cerr << fmt::format("[rmkac] {} artifacts, exit code {}\n", m.artifacts.size(), m.exit_code);
    }
    return m.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

// Config-driven experiment orchestration with artifact manifests.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmkac/config.hpp"

namespace rmkac {

// Exit statuses of a run.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerdictFailure = 2;
inline constexpr int kExitInvalidConfig = 64;

std::string code_version();

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // overrides config.output
  std::optional<std::uint64_t> seed;             // overrides config.seed
  bool quiet = false;
};

struct ArtifactEntry {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string config_hash;
  std::string code_version;
  std::uint64_t seed = 0;
  std::string experiment;
  double wall_clock_seconds = 0.0;
  int threads = 0;
  std::vector<ArtifactEntry> artifacts;
  nlohmann::json verdicts = nlohmann::json::object();  // experiment -> pass / fail / error
  int exit_code = kExitPass;

  nlohmann::json to_json() const;
};

// Runs the configured experiment, writes artifacts plus manifest.json into the
// output directory and returns the manifest. Errors inside an experiment are
// recorded (exit code 1) rather than thrown; I/O failures on the output directory throw.
RunManifest run(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace rmkac

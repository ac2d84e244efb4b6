// Experiment configuration: YAML input, validation, canonical JSON echo.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmkac/ensembles.hpp"
#include "rmkac/models.hpp"

namespace rmkac {

enum class ExperimentKind { verify, stationary, transient, rate, tails, explosion, regularity, symmetry, all };
std::string to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_experiment(const std::string& s);

struct ConfigDiagnostic {
  enum class Level { error, notice };
  Level level = Level::error;
  std::string path;  // e.g. model.q
  std::string message;
  std::string str() const;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigDiagnostic> diags);
  const std::vector<ConfigDiagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<ConfigDiagnostic> diags_;
};

struct VerifySection {
  std::size_t samples = 200000;
  int directions = 0;
  int restarts = 32;
  std::size_t kappa_p_samples = 200000;
};

struct StationarySection {
  std::size_t ensemble_size = 16384;
  int max_iterations = 50;
  double tolerance = 1e-3;
  bool probe = true;
  std::size_t monitor_members = 4096;
  int grid_frames = 16;
  int grid_scales = 12;
  std::size_t mu_inf_samples = 65536;
  std::size_t psi_pairs = 65536;
  int psi_directions = 32;
  std::vector<double> psi_radii{0.25, 0.5, 1.0, 2.0};
};

struct TransientSection {
  std::vector<double> times{0.0, 0.5, 2.0, 8.0};
  std::size_t samples = 20000;
  nlohmann::json initial = {{"law", "uniform_ball"}};
};

struct FourierSection {
  int directions = 64;
  int radii = 24;
  double r_min = 1e-2;
  double r_max = 1e2;
};

struct RateSection {
  std::vector<double> times{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  std::size_t samples = 65536;
  nlohmann::json initial = {{"law", "uniform_ball"}};
  FourierSection grid;
};

struct TailsSection {
  std::size_t samples = 131072;
  std::size_t kappa_star_samples = 200000;
  double s_lo = 2.0;
  double s_hi = 20.0;
};

struct ExplosionSection {
  double radius = 5.0;
  std::vector<double> times{0.0, 2.0, 4.0, 8.0};
  std::size_t samples = 4000;
  nlohmann::json initial = {{"law", "radial_pareto"}, {"index", 1.5}, {"scale", 2.0}};
};

struct RegularitySection {
  double delta = 0.5;
  double a_bar = 1.0;
  std::size_t samples = 100000;
  int directions = 0;
  int decay_directions = 64;
  int decay_radii = 24;
  double r_min = 1e-2;
  double r_max = 1e2;
};

struct SymmetrySection {
  std::size_t samples = 65536;
  int haar_elements = 4;  // extra random rotations for rotation-invariant models
  FourierSection grid{32, 16, 1e-1, 1e1};
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::verify;
  nlohmann::json model;  // canonical model spec
  std::uint64_t seed = 0;
  bool seed_derived = false;
  std::string output = "out";
  VerifySection verify;
  StationarySection stationary;
  TransientSection transient;
  RateSection rate;
  TailsSection tails;
  ExplosionSection explosion;
  RegularitySection regularity;
  SymmetrySection symmetry;

  // every knob after defaults, with stable key order
  nlohmann::json canonical() const;
  // SHA-256 of the canonical echo with the seed left out
  std::string hash() const;
};

// Schema and range check of a parsed document; empty iff valid apart from notices.
std::vector<ConfigDiagnostic> validate(const nlohmann::json& doc);

// Parse YAML text. Throws ConfigError when validation reports an error. Notices
// (for instance a derived seed) are appended to *notices when given.
ExperimentConfig parse_config(const std::string& yaml_text, std::vector<ConfigDiagnostic>* notices = nullptr);
ExperimentConfig load_config(const std::filesystem::path& path, std::vector<ConfigDiagnostic>* notices = nullptr);

// YAML to JSON with scalar types inferred (bool, integer, float, string).
nlohmann::json yaml_to_json(const std::string& yaml_text);

CollisionModel build_model(const nlohmann::json& spec);
InitialLaw build_initial_law(const nlohmann::json& spec, int dim);

}  // namespace rmkac

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rmkac/io.hpp"
#include "rmkac/runner.hpp"

using namespace rmkac;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("rmkac_test_runner_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kSmallVerify = R"(experiment: verify
seed: 5
model: {name: cross2d, q: 0.3}
verify: {samples: 4000, kappa_p_samples: 4000, restarts: 4, directions: 32}
)";

}  // namespace

TEST_CASE("verify run writes a manifest with checksums") {
  ExperimentConfig c = parse_config(kSmallVerify);
  RunOptions o;
  o.out_dir = scratch("verify");
  o.quiet = true;
  RunManifest m = run(c, o);
  CHECK(m.exit_code == kExitPass);
  CHECK(m.verdicts["verify"] == "pass");
  CHECK(m.config_hash == c.hash());
  CHECK(m.seed == 5);
  REQUIRE_FALSE(m.artifacts.empty());
  for (const auto& a : m.artifacts) {
    CHECK(fs::exists(*o.out_dir / a.path));
    CHECK(sha256_file(*o.out_dir / a.path) == a.sha256);
  }
  auto doc = nlohmann::json::parse(slurp(*o.out_dir / "manifest.json"));
  CHECK(doc["code_version"] == code_version());
  CHECK(doc["exit_code"] == 0);
}

TEST_CASE("identical inputs give identical artifacts") {
  ExperimentConfig c = parse_config(kSmallVerify);
  RunOptions a, b;
  a.out_dir = scratch("rep_a");
  b.out_dir = scratch("rep_b");
  a.quiet = b.quiet = true;
  RunManifest ma = run(c, a), mb = run(c, b);
  REQUIRE(ma.artifacts.size() == mb.artifacts.size());
  for (std::size_t i = 0; i < ma.artifacts.size(); ++i) {
    CHECK(ma.artifacts[i].path == mb.artifacts[i].path);
    CHECK(ma.artifacts[i].sha256 == mb.artifacts[i].sha256);
  }
  RunOptions other = a;
  other.out_dir = scratch("rep_seed");
  other.seed = 6;
  RunManifest mc = run(c, other);
  bool differs = false;
  for (std::size_t i = 0; i < ma.artifacts.size(); ++i)
    if (ma.artifacts[i].path != "config.json") differs |= ma.artifacts[i].sha256 != mc.artifacts[i].sha256;
  CHECK(differs);
}

TEST_CASE("verdict failures use their own exit code") {
  ExperimentConfig c = parse_config(R"(experiment: verify
seed: 5
model: {name: diagonal_scalar, dim: 2, weights: {law: fixed, a: 0.6, b: 0.8}, p: 4}
verify: {samples: 4000, kappa_p_samples: 4000, restarts: 4, directions: 32}
)");
  RunOptions o;
  o.out_dir = scratch("fail");
  o.quiet = true;
  RunManifest m = run(c, o);
  CHECK(m.exit_code == kExitVerdictFailure);
  CHECK(m.verdicts["verify"] == "fail");
}

TEST_CASE("experiments that cannot run are recorded as errors") {
  // explosion needs an infinite-temperature initial law
  ExperimentConfig c = parse_config(R"(experiment: explosion
seed: 5
model: {name: cross2d, q: 0.3}
explosion: {samples: 100, initial: {law: standard_gaussian}}
)");
  RunOptions o;
  o.out_dir = scratch("error");
  o.quiet = true;
  RunManifest m = run(c, o);
  CHECK(m.exit_code == kExitError);
  CHECK(m.verdicts["explosion"].get<std::string>().rfind("error", 0) == 0);
}

#include <doctest.h>

#include "rmkac/config.hpp"
#include "rmkac/io.hpp"

using namespace rmkac;

namespace {

bool has_error_at(const std::vector<ConfigDiagnostic>& d, const std::string& path) {
  for (const auto& x : d)
    if (x.level == ConfigDiagnostic::Level::error && x.path == path) return true;
  return false;
}

const char* kCross = R"(experiment: verify
seed: 11
model:
  name: cross2d
  q: 0.3
)";

}  // namespace

TEST_CASE("YAML scalars keep their types") {
  auto j = yaml_to_json("a: 1\nb: 2.5\nc: true\nd: hello\ne: '7'\nf: [1, 2]\n");
  CHECK(j["a"].is_number_integer());
  CHECK(j["b"].is_number_float());
  CHECK(j["c"].is_boolean());
  CHECK(j["d"] == "hello");
  CHECK(j["e"].is_string());
  CHECK(j["f"].size() == 2);
}

TEST_CASE("a minimal config parses with defaults") {
  ExperimentConfig c = parse_config(kCross);
  CHECK(c.experiment == ExperimentKind::verify);
  CHECK(c.seed == 11);
  CHECK_FALSE(c.seed_derived);
  CHECK(c.verify.samples == 200000);
  CHECK(c.stationary.ensemble_size == 16384);
  CHECK(build_model(c.model).name() == "cross2d");
  auto canon = c.canonical();
  CHECK(canon["verify"]["samples"] == 200000);
}

TEST_CASE("range and key errors name the offending field") {
  auto bad_q = validate(yaml_to_json("experiment: verify\nseed: 1\nmodel: {name: cross2d, q: 1.5}\n"));
  CHECK(has_error_at(bad_q, "model.q"));
  auto edge_q = validate(yaml_to_json("experiment: verify\nseed: 1\nmodel: {name: cross2d, q: 0}\n"));
  CHECK(has_error_at(edge_q, "model.q"));
  auto unknown = validate(yaml_to_json("experiment: verify\nseed: 1\nmodel: {name: cross2d, q: 0.3}\nverify: {sample: 10}\n"));
  CHECK(has_error_at(unknown, "verify.sample"));
  auto bad_model = validate(yaml_to_json("experiment: verify\nmodel: {name: boltzmann}\n"));
  CHECK(has_error_at(bad_model, "model.name"));
  auto bad_exp = validate(yaml_to_json("experiment: simulate\nseed: 1\nmodel: {name: cross2d, q: 0.3}\n"));
  CHECK(has_error_at(bad_exp, "experiment"));
  auto times = validate(
      yaml_to_json("experiment: rate\nseed: 1\nmodel: {name: cross2d, q: 0.3}\nrate: {times: [0, 2, 1]}\n"));
  CHECK(has_error_at(times, "rate.times"));
  auto maxwell_law = validate(yaml_to_json(
      "experiment: verify\nseed: 1\nmodel: {name: maxwell, dim: 3, alpha: {law: point, value: 0.5}}\n"));
  CHECK(has_error_at(maxwell_law, "model"));
  CHECK_THROWS_AS(parse_config("experiment: verify\nseed: 1\nmodel: {name: cross2d, q: 2}\n"), ConfigError);
}

TEST_CASE("missing seed is derived from the hash") {
  std::vector<ConfigDiagnostic> notes;
  ExperimentConfig c = parse_config("experiment: verify\nmodel: {name: cross2d, q: 0.3}\n", &notes);
  CHECK(c.seed_derived);
  REQUIRE_FALSE(notes.empty());
  CHECK(notes[0].level == ConfigDiagnostic::Level::notice);
  CHECK(c.seed == std::stoull(c.hash().substr(0, 16), nullptr, 16));
  ExperimentConfig again = parse_config("experiment: verify\nmodel: {name: cross2d, q: 0.3}\n");
  CHECK(again.seed == c.seed);
}

TEST_CASE("hash ignores the seed but not the knobs") {
  ExperimentConfig a = parse_config(kCross);
  ExperimentConfig b = parse_config(std::string(kCross) + "verify: {samples: 1000}\n");
  ExperimentConfig c = parse_config("experiment: verify\nseed: 99\nmodel:\n  name: cross2d\n  q: 0.3\n");
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() == c.hash());
  CHECK(a.hash().size() == 64);
}

TEST_CASE("models and initial laws from config entries") {
  auto m = build_model(nlohmann::json::parse(
      R"({"name": "random_rotation", "dim": 3, "weights": {"law": "fixed", "a": 0.6, "b": 0.8}, "p": 4})"));
  CHECK(m.dim() == 3);
  CHECK(*m.reference().kappa_p == doctest::Approx(0.1296 + 0.4096));
  auto mx = build_model(nlohmann::json::parse(R"({"name": "mixture", "dim": 1, "p": 4,
      "atoms": [{"probability": 1.0, "left": [[0.6]], "right": [[0.8]]}]})"));
  CHECK(mx.dim() == 1);
  InitialLaw p = build_initial_law(nlohmann::json::parse(R"({"law": "radial_pareto", "index": 1.5})"), 2);
  CHECK_FALSE(p.finite_temperature());
  InitialLaw g = build_initial_law(nlohmann::json::parse(R"({"law": "uniform_ball"})"), 3);
  REQUIRE(g.finite_temperature());
  CHECK(g.covariance()->trace() == doctest::Approx(3.0));
}

TEST_CASE("artifact helpers") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3) == "0.333333333333");
  CHECK(format_number(-0.0) == "0");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CsvTable t({"a", "b"});
  t.row(std::vector<double>{1.0, 2.5});
  t.row(std::vector<std::string>{"x", "y"});
  CHECK(t.str() == "a,b\n1,2.5\nx,y\n");
  CHECK_THROWS(t.row(std::vector<std::string>{"x,1", "y"}));
}

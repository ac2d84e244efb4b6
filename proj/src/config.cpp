#include "rmkac/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "rmkac/io.hpp"

namespace rmkac {

using nlohmann::json;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::verify: return "verify";
    case ExperimentKind::stationary: return "stationary";
    case ExperimentKind::transient: return "transient";
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::tails: return "tails";
    case ExperimentKind::explosion: return "explosion";
    case ExperimentKind::regularity: return "regularity";
    case ExperimentKind::symmetry: return "symmetry";
    case ExperimentKind::all: return "all";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment(const std::string& s) {
  for (auto k : {ExperimentKind::verify, ExperimentKind::stationary, ExperimentKind::transient, ExperimentKind::rate,
                 ExperimentKind::tails, ExperimentKind::explosion, ExperimentKind::regularity, ExperimentKind::symmetry,
                 ExperimentKind::all})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string ConfigDiagnostic::str() const {
  return fmt::format("{}: {}: {}", level == Level::error ? "error" : "notice", path.empty() ? "<root>" : path,
                     message);
}

namespace {

std::string join_messages(const std::vector<ConfigDiagnostic>& d) {
  std::string s = "invalid configuration";
  for (const auto& x : d) s += "\n  " + x.str();
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigDiagnostic> diags)
    : std::runtime_error(join_messages(diags)), diags_(std::move(diags)) {}

// ---- YAML to JSON ----

namespace {

json scalar_to_json(const YAML::Node& n) {
  const std::string& s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  if (s == "true" || s == "True" || s == "yes") return true;
  if (s == "false" || s == "False" || s == "no") return false;
  if (s == "null" || s == "~" || s.empty()) return nullptr;
  {
    std::size_t pos = 0;
    try {
      long long v = std::stoll(s, &pos, 10);
      if (pos == s.size()) return v;
    } catch (...) {
    }
  }
  {
    std::size_t pos = 0;
    try {
      double v = std::stod(s, &pos);
      if (pos == s.size()) return v;
    } catch (...) {
    }
  }
  return s;
}

json node_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Scalar: return scalar_to_json(n);
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& x : n) a.push_back(node_to_json(x));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = node_to_json(kv.second);
      return o;
    }
  }
  return nullptr;
}

}  // namespace

json yaml_to_json(const std::string& text) {
  try {
    return node_to_json(YAML::Load(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError({{ConfigDiagnostic::Level::error, "", std::string("YAML parse error: ") + e.what()}});
  }
}

// ---- schema ----

namespace {

enum class Kind { integer, count, real, boolean, string, real_list, object, any };

struct Field {
  std::string key;
  Kind kind;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

using Diags = std::vector<ConfigDiagnostic>;

void error(Diags& d, const std::string& path, const std::string& msg) {
  d.push_back({ConfigDiagnostic::Level::error, path, msg});
}

std::string join_path(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

bool check_range(Diags& d, const std::string& path, double v, const Field& f) {
  if (!std::isfinite(v) || v < f.lo || v > f.hi) {
    error(d, path, fmt::format("value {} outside the allowed range [{}, {}]", v, f.lo, f.hi));
    return false;
  }
  return true;
}

void check_value(Diags& d, const std::string& path, const json& v, const Field& f) {
  switch (f.kind) {
    case Kind::integer:
    case Kind::count:
      if (!v.is_number_integer()) return error(d, path, "expected an integer");
      check_range(d, path, v.get<double>(), f);
      return;
    case Kind::real:
      if (!v.is_number()) return error(d, path, "expected a number");
      check_range(d, path, v.get<double>(), f);
      return;
    case Kind::boolean:
      if (!v.is_boolean()) error(d, path, "expected true or false");
      return;
    case Kind::string:
      if (!v.is_string()) error(d, path, "expected a string");
      return;
    case Kind::real_list:
      if (!v.is_array() || v.empty()) return error(d, path, "expected a non-empty list of numbers");
      for (std::size_t i = 0; i < v.size(); ++i) {
        std::string p = fmt::format("{}[{}]", path, i);
        if (!v[i].is_number())
          error(d, p, "expected a number");
        else
          check_range(d, p, v[i].get<double>(), f);
      }
      return;
    case Kind::object:
      if (!v.is_object()) error(d, path, "expected a mapping");
      return;
    case Kind::any: return;
  }
}

// checks known keys and value kinds; returns false if the value is not a mapping
bool check_section(Diags& d, const std::string& path, const json& sec, const std::vector<Field>& fields) {
  if (!sec.is_object()) {
    error(d, path, "expected a mapping");
    return false;
  }
  for (auto it = sec.begin(); it != sec.end(); ++it) {
    auto f = std::find_if(fields.begin(), fields.end(), [&](const Field& x) { return x.key == it.key(); });
    if (f == fields.end()) {
      error(d, join_path(path, it.key()), "unknown key");
      continue;
    }
    check_value(d, join_path(path, it.key()), it.value(), *f);
  }
  return true;
}

void require(Diags& d, const std::string& path, const json& sec, std::initializer_list<const char*> keys) {
  for (const char* k : keys)
    if (!sec.contains(k)) error(d, join_path(path, k), "missing required key");
}

void check_increasing(Diags& d, const std::string& path, const json& v) {
  if (!v.is_array()) return;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i].is_number() && v[i - 1].is_number() && !(v[i].get<double>() > v[i - 1].get<double>()))
      return error(d, path, "values must be strictly increasing");
}

const double kInf = std::numeric_limits<double>::infinity();

void check_scalar_law(Diags& d, const std::string& path, const json& s) {
  if (!s.is_object() || !s.contains("law") || !s["law"].is_string())
    return error(d, path, "expected a mapping with a 'law' key");
  const std::string law = s["law"];
  if (law == "point") {
    check_section(d, path, s, {{"law", Kind::string}, {"value", Kind::real}});
    require(d, path, s, {"value"});
  } else if (law == "two_point") {
    check_section(d, path, s, {{"law", Kind::string}, {"a", Kind::real}, {"b", Kind::real}, {"prob_a", Kind::real, 0, 1}});
    require(d, path, s, {"a", "b", "prob_a"});
  } else if (law == "uniform") {
    check_section(d, path, s, {{"law", Kind::string}, {"lo", Kind::real}, {"hi", Kind::real}});
    require(d, path, s, {"lo", "hi"});
  } else {
    error(d, join_path(path, "law"), "unknown scalar law '" + law + "' (point, two_point, uniform)");
  }
}

void check_pair_law(Diags& d, const std::string& path, const json& s) {
  if (!s.is_object() || !s.contains("law") || !s["law"].is_string())
    return error(d, path, "expected a mapping with a 'law' key");
  const std::string law = s["law"];
  if (law == "fixed") {
    check_section(d, path, s, {{"law", Kind::string}, {"a", Kind::real}, {"b", Kind::real}});
    require(d, path, s, {"a", "b"});
  } else if (law == "angle") {
    check_section(d, path, s,
                  {{"law", Kind::string},
                   {"lo", Kind::real},
                   {"hi", Kind::real},
                   {"abs_first", Kind::boolean},
                   {"abs_second", Kind::boolean}});
    require(d, path, s, {"lo", "hi"});
  } else if (law == "independent") {
    if (check_section(d, path, s, {{"law", Kind::string}, {"first", Kind::object}, {"second", Kind::object}})) {
      require(d, path, s, {"first", "second"});
      if (s.contains("first")) check_scalar_law(d, join_path(path, "first"), s["first"]);
      if (s.contains("second")) check_scalar_law(d, join_path(path, "second"), s["second"]);
    }
  } else {
    error(d, join_path(path, "law"), "unknown pair law '" + law + "' (fixed, angle, independent)");
  }
}

void check_matrix(Diags& d, const std::string& path, const json& m, int dim) {
  if (!m.is_array() || static_cast<int>(m.size()) != dim) return error(d, path, fmt::format("expected {} rows", dim));
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i].is_array() || static_cast<int>(m[i].size()) != dim)
      return error(d, fmt::format("{}[{}]", path, i), fmt::format("expected {} entries", dim));
    for (const auto& x : m[i])
      if (!x.is_number()) return error(d, fmt::format("{}[{}]", path, i), "expected numbers");
  }
}

void check_model(Diags& d, const json& m) {
  const std::string path = "model";
  if (!m.is_object() || !m.contains("name") || !m["name"].is_string())
    return error(d, path, "expected a mapping with a 'name' key");
  const std::string name = m["name"];
  Field dim{"dim", Kind::integer, 1, kMaxDim};
  Field p{"p", Kind::real, 2.0, kInf};
  std::size_t before = d.size();
  if (name == "maxwell") {
    check_section(d, path, m, {{"name", Kind::string}, {"dim", Kind::integer, 2, kMaxDim}, {"alpha", Kind::object}});
    require(d, path, m, {"alpha"});
    if (m.contains("alpha")) check_scalar_law(d, "model.alpha", m["alpha"]);
  } else if (name == "random_rotation") {
    check_section(d, path, m, {{"name", Kind::string}, dim, {"weights", Kind::object}, {"rotations", Kind::string}, p});
    require(d, path, m, {"weights"});
    if (m.contains("weights")) check_pair_law(d, "model.weights", m["weights"]);
    if (m.contains("rotations") && m["rotations"].is_string() && m["rotations"] != "haar" && m["rotations"] != "identity")
      error(d, "model.rotations", "expected haar or identity");
  } else if (name == "cross2d") {
    check_section(d, path, m, {{"name", Kind::string}, {"dim", Kind::integer, 2, 2}, {"q", Kind::real, 0.0, 1.0}});
    require(d, path, m, {"q"});
    if (m.contains("q") && m["q"].is_number() && (m["q"].get<double>() == 0.0 || m["q"].get<double>() == 1.0))
      error(d, "model.q", "q must lie strictly between 0 and 1");
  } else if (name == "diagonal_scalar") {
    check_section(d, path, m, {{"name", Kind::string}, dim, {"weights", Kind::object}, p});
    require(d, path, m, {"weights"});
    if (m.contains("weights")) check_pair_law(d, "model.weights", m["weights"]);
  } else if (name == "mixture") {
    check_section(d, path, m, {{"name", Kind::string}, dim, {"atoms", Kind::any}, p});
    require(d, path, m, {"dim", "atoms"});
    if (m.contains("atoms") && m.contains("dim") && m["dim"].is_number_integer()) {
      const json& a = m["atoms"];
      int dm = m["dim"];
      if (!a.is_array() || a.empty()) {
        error(d, "model.atoms", "expected a non-empty list");
      } else {
        for (std::size_t i = 0; i < a.size(); ++i) {
          std::string ap = fmt::format("model.atoms[{}]", i);
          if (!check_section(d, ap, a[i], {{"probability", Kind::real, 0, 1}, {"left", Kind::any}, {"right", Kind::any}}))
            continue;
          require(d, ap, a[i], {"probability", "left", "right"});
          if (a[i].contains("left")) check_matrix(d, ap + ".left", a[i]["left"], dm);
          if (a[i].contains("right")) check_matrix(d, ap + ".right", a[i]["right"], dm);
        }
      }
    }
  } else {
    return error(d, "model.name",
                 "unknown model '" + name + "' (maxwell, random_rotation, cross2d, diagonal_scalar, mixture)");
  }
  if (d.size() == before) {
    try {
      (void)build_model(m);
    } catch (const std::exception& e) {
      error(d, path, e.what());
    }
  }
}

void check_initial(Diags& d, const std::string& path, const json& s) {
  if (!s.is_object() || !s.contains("law") || !s["law"].is_string())
    return error(d, path, "expected a mapping with a 'law' key");
  const std::string law = s["law"];
  if (law == "standard_gaussian" || law == "uniform_ball") {
    check_section(d, path, s, {{"law", Kind::string}});
  } else if (law == "gaussian") {
    check_section(d, path, s, {{"law", Kind::string}, {"covariance", Kind::any}});
    require(d, path, s, {"covariance"});
  } else if (law == "radial_pareto") {
    check_section(d, path, s, {{"law", Kind::string}, {"index", Kind::real, 1e-6, kInf}, {"scale", Kind::real, 1e-12, kInf}});
    require(d, path, s, {"index"});
  } else if (law == "symmetric_atoms") {
    check_section(d, path, s, {{"law", Kind::string}, {"atoms", Kind::any}, {"probabilities", Kind::real_list, 0, 1}});
    require(d, path, s, {"atoms", "probabilities"});
  } else {
    error(d, join_path(path, "law"),
          "unknown initial law '" + law + "' (standard_gaussian, uniform_ball, gaussian, radial_pareto, symmetric_atoms)");
  }
}

const double kMaxCount = 1e9;

void check_fourier(Diags& d, const std::string& path, const json& s) {
  check_section(d, path, s,
                {{"directions", Kind::count, 1, 1e5},
                 {"radii", Kind::count, 2, 1e4},
                 {"r_min", Kind::real, 1e-12, kInf},
                 {"r_max", Kind::real, 1e-12, kInf}});
}

void check_times(Diags& d, const std::string& path, const json& sec) {
  if (sec.is_object() && sec.contains("times")) check_increasing(d, join_path(path, "times"), sec["times"]);
}

}  // namespace

std::vector<ConfigDiagnostic> validate(const json& doc) {
  Diags d;
  if (!doc.is_object()) {
    error(d, "", "top level must be a mapping");
    return d;
  }
  const std::vector<Field> top{{"experiment", Kind::string}, {"seed", Kind::any},         {"output", Kind::string},
                               {"model", Kind::object},      {"verify", Kind::object},    {"stationary", Kind::object},
                               {"transient", Kind::object},  {"rate", Kind::object},      {"tails", Kind::object},
                               {"explosion", Kind::object},  {"regularity", Kind::object}, {"symmetry", Kind::object}};
  check_section(d, "", doc, top);
  require(d, "", doc, {"experiment", "model"});
  if (doc.contains("experiment") && doc["experiment"].is_string() && !parse_experiment(doc["experiment"]))
    error(d, "experiment",
          "unknown experiment (verify, stationary, transient, rate, tails, explosion, regularity, symmetry, all)");
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!(s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0)))
      error(d, "seed", "expected a non-negative integer");
  } else {
    d.push_back({ConfigDiagnostic::Level::notice, "seed", "missing; derived from the configuration hash"});
  }
  if (doc.contains("model") && doc["model"].is_object()) check_model(d, doc["model"]);

  if (doc.contains("verify"))
    check_section(d, "verify", doc["verify"],
                  {{"samples", Kind::count, 64, kMaxCount},
                   {"directions", Kind::count, 0, 1e6},
                   {"restarts", Kind::count, 0, 1e4},
                   {"kappa_p_samples", Kind::count, 64, kMaxCount}});
  if (doc.contains("stationary"))
    check_section(d, "stationary", doc["stationary"],
                  {{"ensemble_size", Kind::count, 2, 1e8},
                   {"max_iterations", Kind::count, 1, 1e5},
                   {"tolerance", Kind::real, 0.0, kInf},
                   {"probe", Kind::boolean},
                   {"monitor_members", Kind::count, 0, 1e8},
                   {"grid_frames", Kind::count, 1, 1e4},
                   {"grid_scales", Kind::count, 1, 1e4},
                   {"mu_inf_samples", Kind::count, 2, kMaxCount},
                   {"psi_pairs", Kind::count, 1, kMaxCount},
                   {"psi_directions", Kind::count, 1, 1e5},
                   {"psi_radii", Kind::real_list, 0.0, kInf}});
  if (doc.contains("transient")) {
    const json& s = doc["transient"];
    if (check_section(d, "transient", s,
                      {{"times", Kind::real_list, 0.0, 1e3}, {"samples", Kind::count, 2, kMaxCount}, {"initial", Kind::object}}) &&
        s.contains("initial"))
      check_initial(d, "transient.initial", s["initial"]);
  }
  if (doc.contains("rate")) {
    const json& s = doc["rate"];
    if (check_section(d, "rate", s,
                      {{"times", Kind::real_list, 0.0, 1e3},
                       {"samples", Kind::count, 4, kMaxCount},
                       {"initial", Kind::object},
                       {"grid", Kind::object}})) {
      check_times(d, "rate", s);
      if (s.contains("initial")) check_initial(d, "rate.initial", s["initial"]);
      if (s.contains("grid")) check_fourier(d, "rate.grid", s["grid"]);
    }
  }
  if (doc.contains("tails"))
    check_section(d, "tails", doc["tails"],
                  {{"samples", Kind::count, 100, kMaxCount},
                   {"kappa_star_samples", Kind::count, 64, kMaxCount},
                   {"s_lo", Kind::real, 0.0, 1e3},
                   {"s_hi", Kind::real, 0.0, 1e3}});
  if (doc.contains("explosion")) {
    const json& s = doc["explosion"];
    if (check_section(d, "explosion", s,
                      {{"radius", Kind::real, 1e-12, kInf},
                       {"times", Kind::real_list, 0.0, 1e3},
                       {"samples", Kind::count, 2, kMaxCount},
                       {"initial", Kind::object}})) {
      check_times(d, "explosion", s);
      if (s.contains("initial")) check_initial(d, "explosion.initial", s["initial"]);
    }
  }
  if (doc.contains("regularity"))
    check_section(d, "regularity", doc["regularity"],
                  {{"delta", Kind::real, 0.0, kInf},
                   {"a_bar", Kind::real, 0.0, kInf},
                   {"samples", Kind::count, 64, kMaxCount},
                   {"directions", Kind::count, 0, 1e6},
                   {"decay_directions", Kind::count, 1, 1e5},
                   {"decay_radii", Kind::count, 2, 1e4},
                   {"r_min", Kind::real, 1e-12, kInf},
                   {"r_max", Kind::real, 1e-12, kInf}});
  if (doc.contains("symmetry")) {
    const json& s = doc["symmetry"];
    if (check_section(d, "symmetry", s,
                      {{"samples", Kind::count, 2, kMaxCount}, {"haar_elements", Kind::count, 0, 1000}, {"grid", Kind::object}}) &&
        s.contains("grid"))
      check_fourier(d, "symmetry.grid", s["grid"]);
  }
  return d;
}

// ---- building ----

namespace {

ScalarLaw build_scalar(const json& s) {
  const std::string law = s.at("law");
  if (law == "point") return ScalarLaw::point(s.at("value"));
  if (law == "two_point") return ScalarLaw::two_point(s.at("a"), s.at("b"), s.at("prob_a"));
  if (law == "uniform") return ScalarLaw::uniform(s.at("lo"), s.at("hi"));
  throw std::invalid_argument("unknown scalar law " + law);
}

PairLaw build_pair(const json& s) {
  const std::string law = s.at("law");
  if (law == "fixed") return PairLaw::fixed(s.at("a"), s.at("b"));
  if (law == "angle") return PairLaw::angle(s.at("lo"), s.at("hi"), s.value("abs_first", false), s.value("abs_second", false));
  if (law == "independent") return PairLaw::independent(build_scalar(s.at("first")), build_scalar(s.at("second")));
  throw std::invalid_argument("unknown pair law " + law);
}

Matrix build_matrix(const json& m, int dim) {
  Matrix a(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = m.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
  return a;
}

}  // namespace

CollisionModel build_model(const json& m) {
  const std::string name = m.at("name");
  if (name == "maxwell") return maxwell(m.value("dim", 3), build_scalar(m.at("alpha")));
  if (name == "random_rotation")
    return random_rotation(m.value("dim", 3), build_pair(m.at("weights")),
                           m.value("rotations", std::string("haar")) == "identity" ? RotationLaw::identity : RotationLaw::haar,
                           m.value("p", 4.0));
  if (name == "cross2d") return cross2d(m.at("q"));
  if (name == "diagonal_scalar") return diagonal_scalar(m.value("dim", 1), build_pair(m.at("weights")), m.value("p", 4.0));
  if (name == "mixture") {
    int dim = m.at("dim");
    std::vector<MixtureAtom> atoms;
    for (const auto& a : m.at("atoms"))
      atoms.push_back({a.at("probability"), build_matrix(a.at("left"), dim), build_matrix(a.at("right"), dim)});
    return finite_mixture(dim, std::move(atoms), m.value("p", 4.0));
  }
  throw std::invalid_argument("unknown model " + name);
}

InitialLaw build_initial_law(const json& s, int dim) {
  const std::string law = s.at("law");
  if (law == "standard_gaussian") return InitialLaw::standard_gaussian(dim);
  if (law == "uniform_ball") return InitialLaw::uniform_ball(dim);
  if (law == "gaussian") return InitialLaw::gaussian(SymMatrix(build_matrix(s.at("covariance"), dim)));
  if (law == "radial_pareto") return InitialLaw::radial_pareto(dim, s.at("index"), s.value("scale", 1.0));
  if (law == "symmetric_atoms") {
    std::vector<Vector> atoms;
    for (const auto& a : s.at("atoms")) {
      if (static_cast<int>(a.size()) != dim) throw DimensionMismatch("atom dimension");
      Vector v(dim);
      for (int i = 0; i < dim; ++i) v[i] = a.at(static_cast<std::size_t>(i));
      atoms.push_back(v);
    }
    return InitialLaw::symmetric_atoms(std::move(atoms), s.at("probabilities").get<std::vector<double>>());
  }
  throw std::invalid_argument("unknown initial law " + law);
}

// ---- parsed config ----

namespace {

template <class T>
void take(const json& sec, const char* key, T& out) {
  if (sec.contains(key)) out = sec[key].get<T>();
}

void take_fourier(const json& s, FourierSection& f) {
  take(s, "directions", f.directions);
  take(s, "radii", f.radii);
  take(s, "r_min", f.r_min);
  take(s, "r_max", f.r_max);
}

json fourier_json(const FourierSection& f) {
  return {{"directions", f.directions}, {"radii", f.radii}, {"r_min", f.r_min}, {"r_max", f.r_max}};
}

}  // namespace

json ExperimentConfig::canonical() const {
  json j;
  j["experiment"] = to_string(experiment);
  j["model"] = model;
  j["seed"] = seed;
  j["output"] = output;
  j["verify"] = {{"samples", verify.samples},
                 {"directions", verify.directions},
                 {"restarts", verify.restarts},
                 {"kappa_p_samples", verify.kappa_p_samples}};
  const auto& s = stationary;
  j["stationary"] = {{"ensemble_size", s.ensemble_size},   {"max_iterations", s.max_iterations},
                     {"tolerance", s.tolerance},           {"probe", s.probe},
                     {"monitor_members", s.monitor_members}, {"grid_frames", s.grid_frames},
                     {"grid_scales", s.grid_scales},       {"mu_inf_samples", s.mu_inf_samples},
                     {"psi_pairs", s.psi_pairs},           {"psi_directions", s.psi_directions},
                     {"psi_radii", s.psi_radii}};
  j["transient"] = {{"times", transient.times}, {"samples", transient.samples}, {"initial", transient.initial}};
  j["rate"] = {{"times", rate.times}, {"samples", rate.samples}, {"initial", rate.initial}, {"grid", fourier_json(rate.grid)}};
  j["tails"] = {{"samples", tails.samples},
                {"kappa_star_samples", tails.kappa_star_samples},
                {"s_lo", tails.s_lo},
                {"s_hi", tails.s_hi}};
  j["explosion"] = {{"radius", explosion.radius},
                    {"times", explosion.times},
                    {"samples", explosion.samples},
                    {"initial", explosion.initial}};
  const auto& r = regularity;
  j["regularity"] = {{"delta", r.delta},           {"a_bar", r.a_bar},
                     {"samples", r.samples},       {"directions", r.directions},
                     {"decay_directions", r.decay_directions}, {"decay_radii", r.decay_radii},
                     {"r_min", r.r_min},           {"r_max", r.r_max}};
  j["symmetry"] = {{"samples", symmetry.samples},
                   {"haar_elements", symmetry.haar_elements},
                   {"grid", fourier_json(symmetry.grid)}};
  return j;
}

std::string ExperimentConfig::hash() const {
  json j = canonical();
  j.erase("seed");
  return sha256_hex(j.dump());
}

ExperimentConfig parse_config(const std::string& yaml_text, std::vector<ConfigDiagnostic>* notices) {
  json doc = yaml_to_json(yaml_text);
  Diags diags = validate(doc);
  Diags errors;
  for (const auto& x : diags)
    if (x.level == ConfigDiagnostic::Level::error) errors.push_back(x);
  if (!errors.empty()) throw ConfigError(errors);

  ExperimentConfig c;
  c.experiment = *parse_experiment(doc["experiment"]);
  c.model = doc["model"];
  take(doc, "output", c.output);
  if (doc.contains("verify")) {
    const json& s = doc["verify"];
    take(s, "samples", c.verify.samples);
    take(s, "directions", c.verify.directions);
    take(s, "restarts", c.verify.restarts);
    take(s, "kappa_p_samples", c.verify.kappa_p_samples);
  }
  if (doc.contains("stationary")) {
    const json& s = doc["stationary"];
    auto& t = c.stationary;
    take(s, "ensemble_size", t.ensemble_size);
    take(s, "max_iterations", t.max_iterations);
    take(s, "tolerance", t.tolerance);
    take(s, "probe", t.probe);
    take(s, "monitor_members", t.monitor_members);
    take(s, "grid_frames", t.grid_frames);
    take(s, "grid_scales", t.grid_scales);
    take(s, "mu_inf_samples", t.mu_inf_samples);
    take(s, "psi_pairs", t.psi_pairs);
    take(s, "psi_directions", t.psi_directions);
    take(s, "psi_radii", t.psi_radii);
  }
  if (doc.contains("transient")) {
    const json& s = doc["transient"];
    take(s, "times", c.transient.times);
    take(s, "samples", c.transient.samples);
    take(s, "initial", c.transient.initial);
  }
  if (doc.contains("rate")) {
    const json& s = doc["rate"];
    take(s, "times", c.rate.times);
    take(s, "samples", c.rate.samples);
    take(s, "initial", c.rate.initial);
    if (s.contains("grid")) take_fourier(s["grid"], c.rate.grid);
  }
  if (doc.contains("tails")) {
    const json& s = doc["tails"];
    take(s, "samples", c.tails.samples);
    take(s, "kappa_star_samples", c.tails.kappa_star_samples);
    take(s, "s_lo", c.tails.s_lo);
    take(s, "s_hi", c.tails.s_hi);
  }
  if (doc.contains("explosion")) {
    const json& s = doc["explosion"];
    take(s, "radius", c.explosion.radius);
    take(s, "times", c.explosion.times);
    take(s, "samples", c.explosion.samples);
    take(s, "initial", c.explosion.initial);
  }
  if (doc.contains("regularity")) {
    const json& s = doc["regularity"];
    auto& r = c.regularity;
    take(s, "delta", r.delta);
    take(s, "a_bar", r.a_bar);
    take(s, "samples", r.samples);
    take(s, "directions", r.directions);
    take(s, "decay_directions", r.decay_directions);
    take(s, "decay_radii", r.decay_radii);
    take(s, "r_min", r.r_min);
    take(s, "r_max", r.r_max);
  }
  if (doc.contains("symmetry")) {
    const json& s = doc["symmetry"];
    take(s, "samples", c.symmetry.samples);
    take(s, "haar_elements", c.symmetry.haar_elements);
    if (s.contains("grid")) take_fourier(s["grid"], c.symmetry.grid);
  }

  // cross-field checks that need the defaults filled in
  Diags late;
  if (!(c.tails.s_lo < c.tails.s_hi)) error(late, "tails.s_hi", "must exceed s_lo");
  if (!(c.rate.grid.r_min < c.rate.grid.r_max)) error(late, "rate.grid.r_max", "must exceed r_min");
  if (!(c.symmetry.grid.r_min < c.symmetry.grid.r_max)) error(late, "symmetry.grid.r_max", "must exceed r_min");
  if (!(c.regularity.r_max >= 100.0 * c.regularity.r_min))
    error(late, "regularity.r_max", "radii must span at least two decades");
  const int dim = build_model(c.model).dim();
  for (auto [path, spec] : {std::pair{"transient.initial", &c.transient.initial}, std::pair{"rate.initial", &c.rate.initial},
                            std::pair{"explosion.initial", &c.explosion.initial}}) {
    try {
      (void)build_initial_law(*spec, dim);
    } catch (const std::exception& e) {
      error(late, path, e.what());
    }
  }
  if (!late.empty()) throw ConfigError(late);

  if (doc.contains("seed")) {
    c.seed = doc["seed"].get<std::uint64_t>();
  } else {
    c.seed = std::stoull(c.hash().substr(0, 16), nullptr, 16);
    c.seed_derived = true;
  }
  if (notices)
    for (const auto& x : diags)
      if (x.level == ConfigDiagnostic::Level::notice) notices->push_back(x);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::vector<ConfigDiagnostic>* notices) {
  std::ifstream f(path);
  if (!f) throw ConfigError({{ConfigDiagnostic::Level::error, "", "cannot read " + path.string()}});
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), notices);
}

}  // namespace rmkac

#include "rmkac/runner.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "rmkac/diagnostics.hpp"
#include "rmkac/directions.hpp"
#include "rmkac/fourier.hpp"
#include "rmkac/io.hpp"
#include "rmkac/parallel.hpp"
#include "rmkac/stationary.hpp"
#include "rmkac/verifier.hpp"
#include "rmkac/wild.hpp"

namespace rmkac {

namespace fs = std::filesystem;
using nlohmann::json;

std::string code_version() { return "rmkac 0.1.0"; }

json RunManifest::to_json() const {
  json a = json::array();
  for (const auto& e : artifacts) a.push_back({{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  return {{"config_hash", config_hash},
          {"code_version", code_version},
          {"seed", seed},
          {"experiment", experiment},
          {"wall_clock_seconds", wall_clock_seconds},
          {"threads", threads},
          {"artifacts", a},
          {"verdicts", verdicts},
          {"exit_code", exit_code}};
}

namespace {

json vec_json(const Vector& v) { return json(std::vector<double>(v.values().begin(), v.values().end())); }

// NaN and infinities become null in JSON
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k)
    out.push_back(n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (n - 1)));
  return out;
}

struct Constants {
  double kappa = 0.0;
  double kappa_p = 0.0;
  std::string source;
};

enum class Outcome { pass, fail };

class Context {
 public:
  Context(const ExperimentConfig& cfg, fs::path out, std::uint64_t seed, bool quiet)
      : cfg(cfg), model(build_model(cfg.model)), root(seed, "rmkac"), out_(std::move(out)), quiet_(quiet) {}

  const ExperimentConfig& cfg;
  CollisionModel model;
  Rng root;

  template <class... Args>
  void log(fmt::format_string<Args...> f, Args&&... args) {
    if (!quiet_) fmt::print(stderr, "[rmkac] {}\n", fmt::format(f, std::forward<Args>(args)...));
  }

  void json_artifact(const std::string& rel, const json& doc) {
    write_json(out_ / rel, doc);
    files_.push_back(rel);
  }
  void csv_artifact(const std::string& rel, const CsvTable& t) {
    write_csv(out_ / rel, t);
    files_.push_back(rel);
  }
  void text_artifact(const std::string& rel, const std::string& text) {
    write_text(out_ / rel, text);
    files_.push_back(rel);
  }
  const std::vector<std::string>& files() const { return files_; }
  const fs::path& out() const { return out_; }

  const Constants& constants() {
    if (!constants_) {
      const auto& ref = model.reference();
      if (ref.kappa && ref.kappa_p) {
        constants_ = Constants{*ref.kappa, *ref.kappa_p, "closed_form"};
      } else {
        log("estimating contraction constants");
        AssumptionReport r = verify(model, verify_options(), root.child("constants"));
        constants_ = Constants{r.contraction.kappa, r.weight_contraction.kappa_p, "estimated"};
      }
    }
    return *constants_;
  }

  double alpha() {
    const Constants& c = constants();
    return alpha_rule(model.dim(), model.weight().exponent(), c.kappa, c.kappa_p);
  }

  VerifyOptions verify_options() const {
    return {cfg.verify.samples, cfg.verify.directions, cfg.verify.restarts, cfg.verify.kappa_p_samples};
  }

  // Solved once per run and shared by the experiments that need the stationary law.
  const StationaryResult& stationary() {
    if (!stationary_) {
      const auto& s = cfg.stationary;
      StationaryOptions o;
      o.ensemble_size = s.ensemble_size;
      o.max_iterations = s.max_iterations;
      o.tolerance = s.tolerance;
      o.probe = s.probe;
      o.monitor_members = s.monitor_members;
      o.grid_frames = s.grid_frames;
      o.grid_scales = s.grid_scales;
      o.alpha = alpha();
      log("solving for the stationary law (N = {})", o.ensemble_size);
      stationary_ = solve_stationary(model, o, root.child("stationary"));
      log("stationary solve: {} iterations, converged = {}", stationary_->iterations, stationary_->converged);
    }
    return *stationary_;
  }

 private:
  fs::path out_;
  bool quiet_;
  std::vector<std::string> files_;
  std::optional<Constants> constants_;
  std::optional<StationaryResult> stationary_;
};

// ---- experiments ----

Outcome run_verify(Context& ctx) {
  AssumptionReport r = verify(ctx.model, ctx.verify_options(), ctx.root.child("verify"));
  ctx.json_artifact("verify/report.json", to_json(r));
  ctx.text_artifact("verify/report.txt", to_table(r));
  ctx.log("assumptions: 1 {}, 2 {}, 3 {}", to_string(r.assumption_1), to_string(r.assumption_2),
          to_string(r.assumption_3));
  return r.all_pass() ? Outcome::pass : Outcome::fail;
}

std::vector<Vector> psi_points(const CollisionModel& model, int directions, const std::vector<double>& radii) {
  std::vector<Vector> pts;
  for (const auto& e : direction_set(model, directions))
    for (double r : radii) pts.push_back(r * e);
  return pts;
}

CsvTable history_table(const std::vector<IterationRecord>& history) {
  CsvTable t({"iteration", "renormalization", "successive_metric", "probe_metric"});
  for (const auto& h : history)
    t.row({static_cast<double>(h.iteration), h.renormalization, h.successive_metric, h.probe_metric});
  return t;
}

Outcome run_stationary(Context& ctx) {
  const auto& s = ctx.cfg.stationary;
  const int d = ctx.model.dim();
  json doc;
  doc["model"] = ctx.model.describe();
  doc["ensemble_size"] = s.ensemble_size;
  doc["alpha"] = ctx.alpha();
  const StationaryResult* res = nullptr;
  try {
    res = &ctx.stationary();
  } catch (const StationaryDivergence& e) {
    ctx.csv_artifact("stationary/history.csv", history_table(e.history()));
    doc["diverged"] = true;
    doc["message"] = e.what();
    ctx.json_artifact("stationary/stationary.json", doc);
    ctx.log("stationary solve diverged: {}", e.what());
    return Outcome::fail;
  }
  ctx.csv_artifact("stationary/history.csv", history_table(res->history));
  ctx.csv_artifact("stationary/ensemble.csv", matrix_ensemble_table(res->ensemble));

  std::vector<Vector> pts = psi_points(ctx.model, s.psi_directions, s.psi_radii);
  PsiResidual resid = psi_fixed_point_residual(res->ensemble, ctx.model, pts, s.psi_pairs, ctx.root.child("psi_residual"));
  const auto& ref = ctx.model.reference().psi;
  std::vector<std::string> cols;
  for (int i = 0; i < d; ++i) cols.push_back(fmt::format("xi{}", i + 1));
  for (const char* c : {"psi_hat", "psi_reference", "residual"}) cols.push_back(c);
  CsvTable psi(cols);
  double ref_err = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    double ph = psi_eval(res->ensemble, pts[k]);
    double pr = ref ? ref(pts[k]) : std::numeric_limits<double>::quiet_NaN();
    if (ref) ref_err = std::max(ref_err, std::abs(ph - pr));
    std::vector<double> row(pts[k].values().begin(), pts[k].values().end());
    row.push_back(ph);
    row.push_back(pr);
    row.push_back(resid.residuals[k]);
    psi.row(row);
  }
  ctx.csv_artifact("stationary/psi.csv", psi);

  VelocityEnsemble mu = sample_mu_inf(res->ensemble, s.mu_inf_samples, ctx.root.child("mu_inf"));
  Estimate temp = temperature(mu);
  doc["diverged"] = false;
  doc["iterations"] = res->iterations;
  doc["converged"] = res->converged;
  doc["initial_probe_metric"] = res->initial_probe_metric;
  json renorm = json::array();
  for (const auto& h : res->history) renorm.push_back(h.renormalization);
  doc["renormalization"] = renorm;
  doc["warnings"] = res->warnings;
  doc["mean_matrix"] = sym_to_json(res->ensemble.mean());
  doc["psi_max_residual"] = resid.max_residual;
  doc["psi_residual_argmax"] = vec_json(resid.argmax);
  doc["psi_pairs"] = s.psi_pairs;
  doc["psi_grid_points"] = pts.size();
  doc["psi_reference_max_error"] = ref ? json(ref_err) : json(nullptr);
  doc["mu_inf_temperature"] = {{"value", temp.value}, {"stderr", temp.stderr_}};
  ctx.json_artifact("stationary/stationary.json", doc);
  ctx.log("psi fixed-point residual {:.4g}", resid.max_residual);
  return Outcome::pass;
}

Outcome run_transient(Context& ctx) {
  const auto& s = ctx.cfg.transient;
  InitialLaw mu0 = build_initial_law(s.initial, ctx.model.dim());
  const Rng base = ctx.root.child("transient");
  VelocityEnsemble start = sample_initial(mu0, s.samples, base.child("initial"));
  Estimate t0 = temperature(start);
  double theta0 = mu0.covariance() ? mu0.covariance()->trace() / ctx.model.dim() : std::numeric_limits<double>::infinity();
  CsvTable t({"t", "temperature", "stderr", "initial_temperature", "capped", "mean_depth", "conserved"});
  bool all_ok = true;
  json pts = json::array();
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    TransientEnsemble te = sample_transient(ctx.model, mu0, s.times[k], s.samples, base.child(k));
    Estimate e = temperature(te.samples);
    bool ok = !std::isfinite(theta0) || std::abs(e.value - theta0) <= 3.0 * e.stderr_;
    all_ok = all_ok && ok;
    t.row({s.times[k], e.value, e.stderr_, theta0, static_cast<double>(te.capped), te.mean_depth, ok ? 1.0 : 0.0});
    pts.push_back({{"t", s.times[k]}, {"temperature", e.value}, {"stderr", e.stderr_}, {"capped", te.capped},
                   {"mean_depth", te.mean_depth}, {"conserved", ok}});
  }
  ctx.csv_artifact("transient/temperature.csv", t);
  ctx.json_artifact("transient/transient.json",
                    {{"initial", mu0.describe()},
                     {"initial_temperature", num(theta0)},
                     {"initial_sample_temperature", {{"value", t0.value}, {"stderr", t0.stderr_}}},
                     {"samples", s.samples},
                     {"points", pts},
                     {"conserved", all_ok}});
  return all_ok ? Outcome::pass : Outcome::fail;
}

Outcome run_rate(Context& ctx) {
  const auto& s = ctx.cfg.rate;
  const int d = ctx.model.dim();
  const double p = ctx.model.weight().exponent();
  const Constants& c = ctx.constants();
  const double alpha = ctx.alpha();
  const double lambda = lambda_bound(d, p, c.kappa, c.kappa_p, alpha);
  const StationaryResult& st = ctx.stationary();
  const Rng base = ctx.root.child("rate");
  VelocityEnsemble a = sample_mu_inf(st.ensemble, s.samples, base.child("mu_inf_a"));
  VelocityEnsemble b = sample_mu_inf(st.ensemble, s.samples, base.child("mu_inf_b"));
  InitialLaw mu0 = build_initial_law(s.initial, d);
  FourierGrid grid = make_fourier_grid(ctx.model, s.grid.directions, s.grid.radii, s.grid.r_min, s.grid.r_max);
  RateResult rr = convergence_rate(ctx.model, mu0, s.times, s.samples, a, b, ctx.model.weight(), alpha, lambda, grid,
                                   base.child("series"));
  CsvTable t({"t", "metric", "stderr", "noise_floor", "above_floor", "capped", "mean_depth"});
  for (const auto& q : rr.points)
    t.row({q.time, q.metric, q.stderr_, rr.noise_floor, q.above_floor ? 1.0 : 0.0, static_cast<double>(q.capped),
           q.mean_depth});
  ctx.csv_artifact("rate/series.csv", t);
  const bool rate_ok = rr.fitted_rate >= rr.theoretical_rate - 0.1;
  ctx.json_artifact("rate/fit.json", {{"kappa", c.kappa},
                                      {"kappa_p", c.kappa_p},
                                      {"constants_source", c.source},
                                      {"alpha", alpha},
                                      {"lambda", lambda},
                                      {"fitted_rate", rr.fitted_rate},
                                      {"rate_stderr", rr.rate_stderr},
                                      {"theoretical_rate", rr.theoretical_rate},
                                      {"fit_points", rr.fit_points},
                                      {"noise_floor", rr.noise_floor},
                                      {"floor_factor", rr.floor_factor},
                                      {"monotone", rr.monotone},
                                      {"rate_within_tolerance", rate_ok},
                                      {"grid_points", grid.size()},
                                      {"note", "sup over a finite grid: metric values are lower bounds"}});
  ctx.log("fitted rate {:.4g} vs bound {:.4g}", rr.fitted_rate, rr.theoretical_rate);
  return rate_ok && rr.monotone ? Outcome::pass : Outcome::fail;
}

Outcome run_tails(Context& ctx) {
  const auto& s = ctx.cfg.tails;
  const StationaryResult& st = ctx.stationary();
  const Rng base = ctx.root.child("tails");
  VelocityEnsemble mu = sample_mu_inf(st.ensemble, s.samples, base.child("mu_inf"));
  int dirs = ctx.cfg.verify.directions ? ctx.cfg.verify.directions : default_direction_count(ctx.model.dim());
  KappaStarSampler ks(ctx.model, dirs, s.kappa_star_samples, base.child("kappa_star"));
  std::optional<double> s_star = ks.threshold(s.s_lo, s.s_hi);
  const double p = ctx.model.weight().exponent();
  TailReport rep = hill_tail_index(mu, {}, s_star, p);
  CsvTable t({"k", "tail_index"});
  for (std::size_t j = 0; j < rep.ks.size(); ++j) t.row({static_cast<double>(rep.ks[j]), rep.estimates[j]});
  ctx.csv_artifact("tails/hill.csv", t);
  ctx.json_artifact("tails/tails.json", {{"samples", s.samples},
                                         {"plateau", rep.plateau ? json(*rep.plateau) : json(nullptr)},
                                         {"window", {rep.window_lo, rep.window_hi}},
                                         {"plateau_cv", num(rep.plateau_cv)},
                                         {"drift", rep.drift},
                                         {"s_star", s_star ? json(*s_star) : json(nullptr)},
                                         {"p", p},
                                         {"verdict", to_string(rep.verdict)}});
  ctx.log("tail plateau {} vs threshold {}", rep.plateau ? fmt::format("{:.3g}", *rep.plateau) : "none",
          s_star ? fmt::format("{:.3g}", *s_star) : "none");
  bool fail = rep.verdict == TailVerdict::inconsistent || (rep.verdict == TailVerdict::light_tail && s_star);
  return fail ? Outcome::fail : Outcome::pass;
}

Outcome run_explosion(Context& ctx) {
  const auto& s = ctx.cfg.explosion;
  InitialLaw mu0 = build_initial_law(s.initial, ctx.model.dim());
  ExplosionReport rep = explosion_experiment(ctx.model, mu0, s.radius, s.times, s.samples, ctx.root.child("explosion"));
  CsvTable t({"t", "mass", "stderr", "capped"});
  for (std::size_t k = 0; k < rep.times.size(); ++k)
    t.row({rep.times[k], rep.mass[k], rep.stderr_[k], static_cast<double>(rep.capped[k])});
  ctx.csv_artifact("explosion/mass.csv", t);
  ctx.json_artifact("explosion/explosion.json", {{"initial", mu0.describe()},
                                                 {"radius", rep.radius},
                                                 {"samples", s.samples},
                                                 {"mann_kendall_s", rep.mann_kendall_s},
                                                 {"mann_kendall_p", rep.mann_kendall_p},
                                                 {"halved", rep.halved},
                                                 {"pass", rep.pass}});
  return rep.pass ? Outcome::pass : Outcome::fail;
}

Outcome run_regularity(Context& ctx) {
  const auto& s = ctx.cfg.regularity;
  int dirs = s.directions ? s.directions : default_direction_count(ctx.model.dim());
  RegularityCheck reg = regularity_conditions(ctx.model, s.delta, s.a_bar, dirs, s.samples, ctx.root.child("regularity"));
  const StationaryResult& st = ctx.stationary();
  VelocityEnsemble mu = sample_mu_inf(st.ensemble, ctx.cfg.stationary.mu_inf_samples, ctx.root.child("regularity_mu_inf"));
  std::vector<double> radii = log_space(s.r_min, s.r_max, s.decay_radii);
  std::vector<Vector> directions = direction_set(ctx.model, s.decay_directions);
  DecayReport dec = char_decay(mu, directions, radii);
  CsvTable t({"radius", "sup_abs_char_fn", "above_floor"});
  for (const auto& q : dec.points) t.row({q.radius, q.sup_abs, q.above_floor ? 1.0 : 0.0});
  ctx.csv_artifact("regularity/decay.csv", t);
  ctx.json_artifact("regularity/regularity.json", {{"delta", s.delta},
                                                   {"a_bar", s.a_bar},
                                                   {"m_hat", num(reg.m_hat)},
                                                   {"M_hat", num(reg.M_hat)},
                                                   {"m_diverged", reg.m_diverged},
                                                   {"M_diverged", reg.M_diverged},
                                                   {"applicable", reg.applicable},
                                                   {"reason", reg.reason},
                                                   {"decay_exponent", num(dec.exponent)},
                                                   {"decay_verdict", to_string(dec.verdict)},
                                                   {"sobolev", dec.sobolev},
                                                   {"noise_floor", dec.noise_floor},
                                                   {"fit_points", dec.fit_points}});
  ctx.log("char-fn decay: {} (a = {:.3g})", to_string(dec.verdict), dec.exponent);
  return Outcome::pass;
}

Outcome run_symmetry(Context& ctx) {
  const auto& s = ctx.cfg.symmetry;
  const int d = ctx.model.dim();
  const StationaryResult& st = ctx.stationary();
  const Rng base = ctx.root.child("symmetry");
  VelocityEnsemble mu = sample_mu_inf(st.ensemble, s.samples, base.child("mu_inf"));
  FourierGrid grid = make_fourier_grid(ctx.model, s.grid.directions, s.grid.radii, s.grid.r_min, s.grid.r_max);

  struct Element {
    std::string name;
    Matrix m;
    bool required;
  };
  std::vector<Element> group;
  group.push_back({"minus_identity", -1.0 * Matrix::identity(d), true});
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Matrix q = Matrix::identity(d);
      q(i, i) = 0.0;
      q(j, j) = 0.0;
      q(i, j) = -1.0;
      q(j, i) = 1.0;
      group.push_back({fmt::format("quarter_turn_{}{}", i + 1, j + 1), q, false});
    }
  if (ctx.model.rotation_invariant())
    for (int k = 0; k < s.haar_elements; ++k) {
      Rng r = base.child("haar").child(static_cast<std::uint64_t>(k));
      group.push_back({fmt::format("haar_{}", k), haar_rotation(d, r), true});
    }

  CsvTable t({"element", "required", "max_discrepancy", "stderr_at_max", "noise_floor", "pass"});
  json els = json::array();
  bool ok = true;
  for (const auto& g : group) {
    std::vector<Matrix> one{g.m};
    SymmetryReport r = symmetry_test(mu, one, grid);
    if (g.required) ok = ok && r.pass;
    t.row(std::vector<std::string>{g.name, g.required ? "1" : "0", format_number(r.max_discrepancy),
                                   format_number(r.stderr_at_max), format_number(r.noise_floor), r.pass ? "1" : "0"});
    els.push_back({{"element", g.name},
                   {"required", g.required},
                   {"max_discrepancy", r.max_discrepancy},
                   {"stderr_at_max", r.stderr_at_max},
                   {"noise_floor", r.noise_floor},
                   {"argmax", vec_json(r.argmax)},
                   {"pass", r.pass}});
  }
  ctx.csv_artifact("symmetry/symmetry.csv", t);
  ctx.json_artifact("symmetry/symmetry.json", {{"samples", s.samples}, {"grid_points", grid.size()}, {"elements", els}});
  return ok ? Outcome::pass : Outcome::fail;
}

using ExperimentFn = std::function<Outcome(Context&)>;

const std::vector<std::pair<ExperimentKind, ExperimentFn>>& experiments() {
  static const std::vector<std::pair<ExperimentKind, ExperimentFn>> list{
      {ExperimentKind::verify, run_verify},         {ExperimentKind::stationary, run_stationary},
      {ExperimentKind::transient, run_transient},   {ExperimentKind::rate, run_rate},
      {ExperimentKind::tails, run_tails},           {ExperimentKind::explosion, run_explosion},
      {ExperimentKind::regularity, run_regularity}, {ExperimentKind::symmetry, run_symmetry}};
  return list;
}

}  // namespace

RunManifest run(const ExperimentConfig& config, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg = config;
  if (options.seed) cfg.seed = *options.seed;
  const fs::path out = options.out_dir ? *options.out_dir : fs::path(cfg.output);
  fs::create_directories(out);

  RunManifest m;
  m.config_hash = cfg.hash();
  m.code_version = code_version();
  m.seed = cfg.seed;
  m.experiment = to_string(cfg.experiment);
  m.threads = thread_count();

  Context ctx(cfg, out, cfg.seed, options.quiet);
  ctx.json_artifact("config.json", cfg.canonical());
  bool failed = false, errored = false;
  for (const auto& [kind, fn] : experiments()) {
    if (cfg.experiment != ExperimentKind::all && cfg.experiment != kind) continue;
    const std::string name = to_string(kind);
    ctx.log("running {}", name);
    fs::remove_all(out / name);  // no stale artifacts from earlier runs
    try {
      Outcome o = fn(ctx);
      m.verdicts[name] = o == Outcome::pass ? "pass" : "fail";
      failed = failed || o == Outcome::fail;
    } catch (const std::exception& e) {
      m.verdicts[name] = fmt::format("error: {}", e.what());
      errored = true;
      ctx.log("{} failed with an error: {}", name, e.what());
    }
  }
  m.exit_code = errored ? kExitError : failed ? kExitVerdictFailure : kExitPass;
  for (const auto& rel : ctx.files()) {
    fs::path p = out / rel;
    m.artifacts.push_back({rel, sha256_file(p), fs::file_size(p)});
  }
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(out / "manifest.json", m.to_json());
  return m;
}

}  // namespace rmkac

#include "nashgap/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace nashgap {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

std::int64_t get_int(const json& obj, const std::string& key, std::int64_t def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return it->get<std::int64_t>();
}

const char* gamma_name(GammaRule::Kind k) {
  switch (k) {
    case GammaRule::Kind::Constant: return "constant";
    case GammaRule::Kind::Diminishing: return "diminishing";
    case GammaRule::Kind::PowerDiminishing: return "power";
  }
  return "";
}
const char* batch_name(BatchRule::Kind k) {
  switch (k) {
    case BatchRule::Kind::Linear: return "linear";
    case BatchRule::Kind::Sqrt: return "sqrt";
    case BatchRule::Kind::Fixed: return "fixed";
  }
  return "";
}
const char* eps_name(EpsRule::Kind k) {
  switch (k) {
    case EpsRule::Kind::Harmonic: return "harmonic";
    case EpsRule::Kind::SqrtHarmonic: return "sqrt_harmonic";
    case EpsRule::Kind::Fixed: return "fixed";
  }
  return "";
}
const char* inner_name(InnerRule::Kind k) {
  switch (k) {
    case InnerRule::Kind::Formula: return "formula";
    case InnerRule::Kind::Scaled: return "scaled";
    case InnerRule::Kind::Fixed: return "fixed";
    case InnerRule::Kind::Exact: return "exact";
  }
  return "";
}

template <typename Kind, std::size_t N>
Kind parse_kind(const std::string& name, const std::string& where,
                const std::pair<const char*, Kind> (&table)[N]) {
  for (const auto& [n, k] : table)
    if (name == n) return k;
  throw ConfigError("unknown " + where + " rule '" + name + "'");
}

}  // namespace

double default_alpha(const GameSpec& game) {
  double m = 0.0;
  for (const auto& s : game.smoothness) m = std::max(m, s.LG);
  return m > 0.0 ? 2.0 * m : 1.0;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"schema_version", "game", "game_params", "K", "seed", "alpha", "lambda", "gamma",
              "batch", "eps", "inner", "x0", "exact_diagnostics", "exact_tol", "replications",
              "K_grid", "threads", "suites", "slope_band", "output_dir"});
  ExperimentConfig cfg;
  cfg.schema_version = static_cast<int>(get_int(j, "schema_version", kSchemaVersion));
  if (cfg.schema_version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
  if (!j.contains("game")) throw ConfigError("config needs a 'game'");
  cfg.game = get_or<std::string>(j, "game", "");
  // Parameter names are checked by the catalog.
  cfg.game_params = get_or<std::map<std::string, double>>(j, "game_params", {});
  const CatalogEntry entry = make_game(cfg.game, cfg.game_params);

  auto& s = cfg.solver;
  cfg.K_grid = get_or<std::vector<std::int64_t>>(j, "K_grid", {});
  if (j.contains("K")) {
    s.K = get_int(j, "K", 0);
  } else if (!cfg.K_grid.empty()) {
    s.K = *std::max_element(cfg.K_grid.begin(), cfg.K_grid.end());
  } else {
    throw ConfigError("config needs 'K' or 'K_grid'");
  }
  s.seed = static_cast<std::uint64_t>(get_int(j, "seed", 0));
  s.alpha = get_or<double>(j, "alpha", default_alpha(entry.game));
  s.lambda = get_or<double>(j, "lambda", 0.5);
  const ConstantSet constants = compute_constants(entry.game, s.alpha);

  const json gamma = j.value("gamma", json::object());
  check_keys(gamma, "gamma", {"rule", "gamma0", "delta"});
  static const std::pair<const char*, GammaRule::Kind> gamma_table[] = {
      {"constant", GammaRule::Kind::Constant},
      {"diminishing", GammaRule::Kind::Diminishing},
      {"power", GammaRule::Kind::PowerDiminishing}};
  s.gamma.kind = parse_kind(get_or<std::string>(gamma, "rule", "constant"), "gamma", gamma_table);
  s.gamma.gamma0 = get_or<double>(gamma, "gamma0", 1.0 / (2.0 * constants.L1_V_alpha));
  s.gamma.delta = get_or<double>(gamma, "delta", 0.0);

  const json batch = j.value("batch", json::object());
  check_keys(batch, "batch", {"rule", "a", "M"});
  static const std::pair<const char*, BatchRule::Kind> batch_table[] = {
      {"linear", BatchRule::Kind::Linear},
      {"sqrt", BatchRule::Kind::Sqrt},
      {"fixed", BatchRule::Kind::Fixed}};
  s.batch.kind = parse_kind(get_or<std::string>(batch, "rule", "linear"), "batch", batch_table);
  s.batch.a = get_or<double>(batch, "a", 1.0);
  s.batch.M = get_int(batch, "M", 1);

  const json eps = j.value("eps", json::object());
  check_keys(eps, "eps", {"rule", "p", "eps"});
  static const std::pair<const char*, EpsRule::Kind> eps_table[] = {
      {"harmonic", EpsRule::Kind::Harmonic},
      {"sqrt_harmonic", EpsRule::Kind::SqrtHarmonic},
      {"fixed", EpsRule::Kind::Fixed}};
  s.eps.kind = parse_kind(get_or<std::string>(eps, "rule", "harmonic"), "eps", eps_table);
  s.eps.p = get_or<double>(eps, "p", 1.0);
  s.eps.eps = get_or<double>(eps, "eps", 0.1);

  const json inner = j.value("inner", json::object());
  check_keys(inner, "inner", {"rule", "c", "T", "beta_scale"});
  static const std::pair<const char*, InnerRule::Kind> inner_table[] = {
      {"formula", InnerRule::Kind::Formula},
      {"scaled", InnerRule::Kind::Scaled},
      {"fixed", InnerRule::Kind::Fixed},
      {"exact", InnerRule::Kind::Exact}};
  s.inner.kind = parse_kind(get_or<std::string>(inner, "rule", "formula"), "inner", inner_table);
  s.inner.c = get_or<double>(inner, "c", 1.0);
  s.inner.T = get_int(inner, "T", 1);
  s.beta.scale = get_or<double>(inner, "beta_scale", 0.5);

  if (j.contains("x0")) {
    const json& x0 = j["x0"];
    if (x0.is_string()) {
      const std::string mode = x0.get<std::string>();
      if (mode == "ne") {
        if (!entry.known_ne) throw ConfigError("x0 = \"ne\" but game has no known NE");
        const auto& f = entry.known_ne->flat();
        s.x0 = std::vector<double>(f.data(), f.data() + f.size());
      } else if (mode != "origin") {
        throw ConfigError("x0 must be \"origin\", \"ne\" or an array");
      }
    } else {
      s.x0 = get_or<std::vector<double>>(j, "x0", {});
    }
    if (s.x0) starting_point(entry.game, s);
  }
  s.exact_diagnostics = get_or<bool>(j, "exact_diagnostics", false);
  s.exact_tol = get_or<double>(j, "exact_tol", 1e-10);

  cfg.replications = get_int(j, "replications", 1);
  cfg.threads = static_cast<int>(get_int(j, "threads", 1));
  cfg.suites = get_or<std::vector<std::string>>(j, "suites", {});
  if (j.contains("slope_band")) {
    const auto band = get_or<std::vector<double>>(j, "slope_band", {});
    if (band.size() != 2 || !(band[0] < band[1]))
      throw ConfigError("slope_band must be [low, high] with low < high");
    cfg.slope_band = std::make_pair(band[0], band[1]);
  }
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);

  validate(s, constants);
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  for (auto K : cfg.K_grid) {
    SolverConfig probe = s;
    probe.K = K;
    validate(probe, constants);
  }
  const auto known = suite_names();
  for (const auto& name : cfg.suites)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw ConfigError("unknown suite '" + name + "'");
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  const auto& s = cfg.solver;
  json j;
  j["schema_version"] = cfg.schema_version;
  j["game"] = cfg.game;
  j["game_params"] = cfg.game_params;
  j["K"] = s.K;
  j["seed"] = s.seed;
  j["alpha"] = s.alpha;
  j["lambda"] = s.lambda;
  j["gamma"] = {{"rule", gamma_name(s.gamma.kind)}, {"gamma0", s.gamma.gamma0},
                {"delta", s.gamma.delta}};
  j["batch"] = {{"rule", batch_name(s.batch.kind)}, {"a", s.batch.a}, {"M", s.batch.M}};
  j["eps"] = {{"rule", eps_name(s.eps.kind)}, {"p", s.eps.p}, {"eps", s.eps.eps}};
  j["inner"] = {{"rule", inner_name(s.inner.kind)}, {"c", s.inner.c}, {"T", s.inner.T},
                {"beta_scale", s.beta.scale}};
  if (s.x0) j["x0"] = *s.x0;
  else j["x0"] = "origin";
  j["exact_diagnostics"] = s.exact_diagnostics;
  j["exact_tol"] = s.exact_tol;
  j["replications"] = cfg.replications;
  j["K_grid"] = cfg.K_grid;
  j["threads"] = cfg.threads;
  j["suites"] = cfg.suites;
  if (cfg.slope_band) j["slope_band"] = {cfg.slope_band->first, cfg.slope_band->second};
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

// Traces ---------------------------------------------------------------------

std::string trace_csv(const RunTrace& trace, bool exact_diagnostics) {
  std::string out = std::string(kCsvHeader) + "\n";
  char buf[512];
  for (const auto& r : trace.records) {
    std::string exact;
    if (exact_diagnostics && r.res_sq_exact) exact = format_double(*r.res_sq_exact);
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%lld,%.17g,%.17g,%.17g,%s,%lld,%lld\n",
                  static_cast<long long>(r.k), r.gamma, static_cast<long long>(r.M), r.eps,
                  r.v_alpha, r.res_sq_inexact, exact.c_str(),
                  static_cast<long long>(r.inner_steps_cum), static_cast<long long>(r.samples_cum));
    out += buf;
  }
  return out;
}

std::vector<ReplicationResult> run_replications(const GameSpec& game, const ExperimentConfig& cfg) {
  const std::vector<std::int64_t> Ks =
      cfg.K_grid.empty() ? std::vector<std::int64_t>{cfg.solver.K} : cfg.K_grid;
  return parallel_map(cfg.replications, cfg.threads, [&](std::int64_t r) {
    ReplicationResult res;
    try {
      res.traces = run_grid(game, cfg.solver, Ks, static_cast<std::uint64_t>(r));
    } catch (const RunAborted& e) {
      res.aborted = e.what();
      res.traces.push_back(e.partial());
    }
    return res;
  });
}

// Suites ---------------------------------------------------------------------

std::vector<std::string> suite_names() {
  return {"gradients", "gap",         "lipschitz", "inner",     "moments",        "inequalities",
          "convergence", "rates",     "selection", "audit",     "reproducibility"};
}

namespace {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  std::int64_t n = 0;
  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
    sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  }
  double half_width() const { return n > 1 ? 1.96 * sd / std::sqrt(static_cast<double>(n)) : 0.0; }

 private:
  double m2 = 0.0;
};

CheckResult make_check(std::string name, std::string desc, double measured, double bound,
                       bool pass, double estimate = 0.0) {
  CheckResult c;
  c.name = std::move(name);
  c.description = std::move(desc);
  c.measured = measured;
  c.bound = bound;
  c.pass = pass;
  c.estimate = estimate;
  return c;
}

double suite_alpha(const CatalogEntry& e, const SuiteOptions& opt) {
  return opt.alpha > 0.0 ? opt.alpha : default_alpha(e.game);
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

/// Same catalog game with sigma = 0.
CatalogEntry noiseless(const CatalogEntry& e) {
  std::map<std::string, double> p = e.params;
  p["sigma"] = 0.0;
  return make_game(e.game.name, p);
}

void suite_gradients(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep) {
  const auto& g = e.game;
  const double a = suite_alpha(e, opt);
  const RngStream s = RngStream(opt.seed).child(1);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const BlockVector x = random_feasible_point(g, s, i);
    const Eigen::VectorXd exact = grad_v_alpha_exact(g, x, a, 1e-12);
    auto f = [&](const Eigen::VectorXd& v) {
      return v_alpha_exact(g, BlockVector::split(v, x.dims()), a, 1e-13).value;
    };
    const Eigen::VectorXd fd = finite_difference_grad(f, x.flat(), 1e-5);
    const double rel = (fd - exact).norm() / std::max(exact.norm(), 1e-12);
    worst = std::max(worst, rel);
  }
  rep.checks.push_back(make_check(g.name + " grad V_alpha vs finite differences",
                                  "max relative l2 error over 50 random feasible points", worst,
                                  1e-4, worst <= 1e-4));
}

void suite_gap(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep) {
  const auto& g = e.game;
  const double a = suite_alpha(e, opt);
  const RngStream s = RngStream(opt.seed).child(2);
  double lowest = INFINITY;
  for (std::uint64_t i = 0; i < 1000; ++i)
    lowest = std::min(lowest, v_alpha_exact(g, random_feasible_point(g, s, i), a).value);
  rep.checks.push_back(make_check(g.name + " V_alpha nonnegative", "min V_alpha over 1000 points",
                                  lowest, -1e-8, lowest >= -1e-8));
  if (e.known_ne) {
    const double v = v_alpha_exact(g, *e.known_ne, a).value;
    rep.checks.push_back(make_check(g.name + " V_alpha at NE", "V_alpha(x*)", v, 1e-6, v <= 1e-6));
    const double r = vi_residual(g, *e.known_ne);
    rep.checks.push_back(make_check(g.name + " VI residual at NE", "||x* - Pi[x* - F(x*)]||", r,
                                    1e-8, r <= 1e-8));
  }
  bool small = true;
  for (const auto& set : g.sets) small = small && set.as_box() && set.dim() <= 2;
  if (small) {
    const double h = g.dim() <= 2 ? 1e-3 : 1e-2;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const BlockVector x = random_feasible_point(g, s.child(7), i);
      worst = std::max(worst, std::abs(brute_force_gap(g, x, a, h) - v_alpha_exact(g, x, a).value));
    }
    rep.checks.push_back(make_check(g.name + " brute-force gap agreement",
                                    "max |grid sup - V_alpha| over 20 points", worst, 1e-3,
                                    worst <= 1e-3));
  }
}

void suite_lipschitz(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep) {
  const double a = suite_alpha(e, opt);
  const ConstantSet c = compute_constants(e.game, a);
  const auto sw = lipschitz_sweep(e.game, c, 1000, RngStream(opt.seed).child(3));
  rep.violations.push_back({e.game.name + " y_alpha Lipschitz", sw.pairs, sw.violations_y,
                            sw.max_y - c.L0_y_alpha});
  rep.violations.push_back({e.game.name + " V_alpha Lipschitz", sw.pairs, sw.violations_v,
                            sw.max_v - c.L0_V_alpha});
  rep.violations.push_back({e.game.name + " grad V_alpha Lipschitz", sw.pairs,
                            sw.violations_grad, sw.max_grad - c.L1_V_alpha});
}

void suite_inner(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep) {
  const double a = suite_alpha(e, opt);
  const double l1v = smoothness_v_alpha(e.game, a);
  const RngStream s = RngStream(opt.seed).child(4);
  const BlockVector x = random_feasible_point(e.game, s, 0);
  for (double eps : {0.1, 0.01}) {
    InnerConfig inner;
    inner.alpha = a;
    inner.epsilon_target = eps;
    inner.l1_v_alpha = l1v;
    const auto r = inner_contract(e.game, x, inner, 200, s.child(1));
    char name[64];
    std::snprintf(name, sizeof name, " inner SA eps=%g", eps);
    rep.checks.push_back(make_check(e.game.name + name,
                                    "95% upper bound of E||z_T - y_alpha||^2, 200 reps, T = " +
                                        std::to_string(r.steps),
                                    r.upper95, eps, r.upper95 <= eps, r.mean));
  }
}

void suite_moments(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep) {
  const double a = suite_alpha(e, opt);
  const RngStream s = RngStream(opt.seed).child(5);
  const BlockVector x = random_feasible_point(e.game, s, 0);
  for (double eps : {0.1, 0.01}) {
    for (std::int64_t M : {1, 16, 256}) {
      MomentCheckConfig mc;
      mc.alpha = a;
      mc.epsilon = eps;
      mc.M = M;
      mc.reps = 200;
      CheckResult c = moment_check(e.game, x, mc, s.child(static_cast<std::uint64_t>(M) * 10 +
                                                          (eps < 0.05 ? 1 : 0)));
      c.name = e.game.name + " " + c.name;
      rep.checks.push_back(c);
    }
  }
}

SolverConfig base_solver(const CatalogEntry& e, const SuiteOptions& opt, std::int64_t K) {
  SolverConfig cfg;
  cfg.alpha = suite_alpha(e, opt);
  cfg.K = K;
  cfg.seed = opt.seed;
  cfg.gamma.gamma0 = 1.0 / (2.0 * compute_constants(e.game, cfg.alpha).L1_V_alpha);
  return cfg;
}

void suite_inequalities(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep) {
  SolverConfig cfg = base_solver(e, opt, 500);
  cfg.inner.kind = InnerRule::Kind::Scaled;
  cfg.inner.c = 2.0;
  cfg.exact_diagnostics = true;
  const ConstantSet c = compute_constants(e.game, cfg.alpha);
  const RunTrace t = run(e.game, cfg, 0);
  ViolationCount sw = sandwich_violations(t, 1e-8);
  sw.name = e.game.name + " " + sw.name;
  ViolationCount ds = descent_violations(t, c.L1_V_alpha, 1e-8);
  ds.name = e.game.name + " " + ds.name;
  rep.violations.push_back(sw);
  rep.violations.push_back(ds);
}

void suite_convergence(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep) {
  const CatalogEntry d = noiseless(e);
  if (!d.known_ne) return;
  SolverConfig cfg = base_solver(d, opt, 5000);
  cfg.inner.kind = InnerRule::Kind::Exact;
  cfg.batch.kind = BatchRule::Kind::Fixed;
  cfg.batch.M = 1;
  cfg.exact_tol = 1e-12;
  BlockVector x = starting_point(d.game, cfg);
  double dist = INFINITY, res = INFINITY;
  std::int64_t hit = -1;
  for (std::int64_t k = 0; k < cfg.K; ++k) {
    const Eigen::VectorXd g = grad_v_alpha_exact(d.game, x, cfg.alpha, 1e-12);
    dist = (x.flat() - d.known_ne->flat()).norm();
    res = residual_map(d.game, x, 1.0 / cfg.gamma.gamma0, g).norm();
    if (dist <= 1e-4 && res <= 1e-4) {
      hit = k;
      break;
    }
    x = step(d.game, x, k, cfg, nullptr, RngStream(cfg.seed).child(k)).next;
  }
  rep.checks.push_back(make_check(d.game.name + " deterministic convergence",
                                  "first k with ||x_k - x*|| and ||G|| <= 1e-4 (bound: 5000)",
                                  hit < 0 ? INFINITY : static_cast<double>(hit), 5000.0, hit >= 0,
                                  std::max(dist, res)));
}

struct RateOutcome {
  std::vector<std::pair<double, double>> expected_points;
  std::vector<std::pair<double, double>> sampled_points;
  std::vector<double> bounds;
};

RateOutcome rate_experiment(const GameSpec& game, const SolverConfig& cfg,
                            const std::vector<std::int64_t>& Ks, std::int64_t reps, int threads) {
  const ConstantSet c = compute_constants(game, cfg.alpha);
  const auto runs = parallel_map(reps, threads, [&](std::int64_t r) {
    return run_grid(game, cfg, Ks, static_cast<std::uint64_t>(r));
  });
  RateOutcome out;
  for (std::size_t i = 0; i < Ks.size(); ++i) {
    Moments sampled, expected, v_ell;
    for (const auto& tr : runs) {
      sampled.add(tr[i].res_sq_at_selected);
      expected.add(tr[i].res_sq_expected_over_r.value());
      v_ell.add(tr[i].v_exact_at_ell.value());
    }
    const auto K = static_cast<double>(Ks[i]);
    out.expected_points.push_back({K, expected.mean});
    out.sampled_points.push_back({K, sampled.mean});
    out.bounds.push_back(averaged_residual_bound(runs[0][i], c, v_ell.mean, cfg.gamma.gamma0));
  }
  return out;
}

SlopeResult make_slope(std::string name, const std::vector<std::pair<double, double>>& pts,
                       double lo, double hi) {
  const SlopeFit f = fit_loglog_slope(pts);
  SlopeResult s;
  s.name = std::move(name);
  s.slope = f.slope;
  s.stderr_ = f.stderr_;
  s.intercept = f.intercept;
  s.low = lo;
  s.high = hi;
  s.pass = f.slope >= lo && f.slope <= hi;
  s.points = pts;
  return s;
}

void suite_rates(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep,
                 std::ostream& log) {
  if (!e.known_ne) return;
  const std::vector<std::int64_t> Ks{250, 500, 1000, 2000};
  for (bool diminishing : {false, true}) {
    SolverConfig cfg = base_solver(e, opt, 2000);
    cfg.inner.kind = InnerRule::Kind::Scaled;
    cfg.inner.c = 2.0;
    cfg.exact_diagnostics = true;
    cfg.x0 = to_std(e.known_ne->flat());
    if (diminishing) {
      cfg.gamma.kind = GammaRule::Kind::Diminishing;
      cfg.batch.kind = BatchRule::Kind::Sqrt;
      cfg.eps.kind = EpsRule::Kind::SqrtHarmonic;
    }
    const std::string tag = e.game.name + (diminishing ? " diminishing" : " constant");
    log << "  rates: " << tag << " step, 50 replications x K in {250, 500, 1000, 2000}\n";
    const RateOutcome o = rate_experiment(e.game, cfg, Ks, 50, opt.threads);
    const double lo = diminishing ? -0.8 : -1.3;
    const double hi = diminishing ? -0.2 : -0.7;
    rep.slopes.push_back(make_slope(tag + " slope of E_R ||G(x_R)||^2", o.expected_points, lo, hi));
    SlopeResult sampled = make_slope(tag + " slope, sampled R", o.sampled_points, lo, hi);
    rep.slopes.push_back(sampled);
    for (std::size_t i = 0; i < Ks.size(); ++i) {
      rep.checks.push_back(make_check(
          tag + " averaged-residual bound K=" + std::to_string(Ks[i]),
          "mean ||G(x_R)||^2 over 50 replications vs evaluated bound",
          o.sampled_points[i].second, o.bounds[i], o.sampled_points[i].second <= o.bounds[i]));
    }
  }
}

void suite_selection(const CatalogEntry&, const SuiteOptions& opt, VerificationReport& rep) {
  const std::int64_t K = 20;
  const std::int64_t ell = selection_start(0.5, K);
  const std::int64_t draws = 100000;
  for (bool diminishing : {false, true}) {
    GammaRule g;
    g.gamma0 = 0.1;
    g.kind = diminishing ? GammaRule::Kind::Diminishing : GammaRule::Kind::Constant;
    const auto pmf = iterate_pmf(g, ell, K);
    std::vector<std::int64_t> counts(pmf.size(), 0);
    const RngStream s = RngStream(opt.seed).child(9).child(diminishing ? 1 : 0);
    for (std::int64_t d = 0; d < draws; ++d)
      ++counts[static_cast<std::size_t>(
          select_random_iterate(g, ell, K, s.child(static_cast<std::uint64_t>(d))) - ell)];
    double worst = 0.0;
    for (std::size_t j = 0; j < pmf.size(); ++j) {
      const double sd = std::sqrt(draws * pmf[j] * (1.0 - pmf[j]));
      worst = std::max(worst, std::abs(static_cast<double>(counts[j]) - draws * pmf[j]) / sd);
    }
    rep.checks.push_back(make_check(std::string("iterate pmf, ") +
                                        (diminishing ? "diminishing" : "constant") + " step",
                                    "max |count - n p_j| / sd over the support, 1e5 draws", worst,
                                    3.0, worst <= 3.0));
  }
}

void suite_audit(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep) {
  SolverConfig cfg = base_solver(e, opt, 12);
  const RunTrace t = run(e.game, cfg, 0);
  const ConstantSet c = compute_constants(e.game, cfg.alpha);
  std::int64_t expected = 0;
  for (std::int64_t k = 0; k < cfg.K; ++k) {
    const std::int64_t M = cfg.batch.at(k);
    expected += M * e.game.num_players();
    for (std::size_t nu = 0; nu < e.game.sets.size(); ++nu)
      expected += sa_iteration_count(cfg.eps.at(k), c.L1_V_alpha, cfg.alpha,
                                     squared_diameter(e.game.sets[nu]));
  }
  const auto got = t.records.back().samples_cum;
  rep.checks.push_back(make_check(e.game.name + " sample-count audit",
                                  "samples_cum at K vs N sum M_k + sum T_k^nu",
                                  static_cast<double>(got), static_cast<double>(expected),
                                  got == expected));
}

void suite_reproducibility(const CatalogEntry& e, const SuiteOptions& opt, VerificationReport& rep) {
  ExperimentConfig cfg;
  cfg.game = e.game.name;
  cfg.solver = base_solver(e, opt, 40);
  cfg.solver.inner.kind = InnerRule::Kind::Scaled;
  cfg.replications = 4;
  cfg.threads = 1;
  auto csvs = [&](const ExperimentConfig& c) {
    std::vector<std::string> out;
    for (const auto& r : run_replications(e.game, c)) out.push_back(trace_csv(r.traces[0], false));
    return out;
  };
  const auto a = csvs(cfg);
  const auto b = csvs(cfg);
  cfg.threads = 4;
  const auto p = csvs(cfg);
  const bool same = a == b && a == p;
  rep.checks.push_back(make_check(e.game.name + " reproducibility",
                                  "identical CSVs across reruns and 1 vs 4 threads",
                                  same ? 0.0 : 1.0, 0.0, same));
}

}  // namespace

void run_suite(const std::string& suite, const CatalogEntry& entry, const SuiteOptions& opt,
               VerificationReport& report, std::ostream& log) {
  if (suite == "all") {
    for (const auto& s : suite_names()) run_suite(s, entry, opt, report, log);
    return;
  }
  log << "suite " << suite << " on " << entry.game.name << "\n";
  if (suite == "gradients") suite_gradients(entry, opt, report);
  else if (suite == "gap") suite_gap(entry, opt, report);
  else if (suite == "lipschitz") suite_lipschitz(entry, opt, report);
  else if (suite == "inner") suite_inner(entry, opt, report);
  else if (suite == "moments") suite_moments(entry, opt, report);
  else if (suite == "inequalities") suite_inequalities(entry, opt, report);
  else if (suite == "convergence") suite_convergence(entry, opt, report);
  else if (suite == "rates") suite_rates(entry, opt, report, log);
  else if (suite == "selection") suite_selection(entry, opt, report);
  else if (suite == "audit") suite_audit(entry, opt, report);
  else if (suite == "reproducibility") suite_reproducibility(entry, opt, report);
  else throw ConfigError("unknown suite '" + suite + "'");
}

// Orchestration ----------------------------------------------------------------

namespace {

json constants_json(const ConstantSet& c) {
  json pp = json::array();
  for (const auto& p : c.per_player)
    pp.push_back({{"L0", p.L0}, {"L1", p.L1}, {"LG", p.LG}, {"C", p.C}, {"D", p.D}});
  return {{"alpha", c.alpha},       {"L0_y_alpha", c.L0_y_alpha}, {"L0_V_alpha", c.L0_V_alpha},
          {"L1_V_alpha", c.L1_V_alpha}, {"rho", c.rho},           {"mu", c.mu},
          {"mu_alpha_squared", c.mu_alpha_squared}, {"per_player", pp}};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  CatalogEntry entry;
  ConstantSet constants;
  try {
    entry = make_game(cfg.game, cfg.game_params);
    constants = compute_constants(entry.game, cfg.solver.alpha);
    validate(cfg.solver, constants);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  for (const auto& w : entry.warnings) log << "warning: " << w << "\n";

  std::filesystem::path out = cfg.output_dir;
  if (const char* env = std::getenv("NASHGAP_OUTPUT_DIR"); env && *env) out = env;
  std::filesystem::create_directories(out / "traces");

  const std::vector<std::int64_t> Ks =
      cfg.K_grid.empty() ? std::vector<std::int64_t>{cfg.solver.K} : cfg.K_grid;
  log << "running " << cfg.replications << " replication(s) of " << cfg.game << " for K in {";
  for (std::size_t i = 0; i < Ks.size(); ++i) log << (i ? ", " : "") << Ks[i];
  log << "}\n";
  const auto results = run_replications(entry.game, cfg);

  VerificationReport report;
  bool aborted = false;
  json summary;
  summary["game"] = cfg.game;
  summary["replications"] = cfg.replications;
  summary["aborted"] = json::array();
  for (std::size_t r = 0; r < results.size(); ++r) {
    const auto& res = results[r];
    if (res.aborted) {
      aborted = true;
      summary["aborted"].push_back({{"replication", r}, {"reason", *res.aborted}});
      write_file(out / "traces" / ("aborted_rep" + std::to_string(r) + ".csv"),
                 trace_csv(res.traces[0], cfg.solver.exact_diagnostics));
      continue;
    }
    for (std::size_t i = 0; i < Ks.size(); ++i) {
      write_file(out / "traces" /
                     ("K" + std::to_string(Ks[i]) + "_rep" + std::to_string(r) + ".csv"),
                 trace_csv(res.traces[i], cfg.solver.exact_diagnostics));
    }
  }

  summary["per_K"] = json::array();
  std::vector<std::pair<double, double>> mean_points, expected_points;
  ViolationCount sandwich{"residual sandwich", 0, 0, -INFINITY};
  ViolationCount descent{"descent inequality", 0, 0, -INFINITY};
  for (std::size_t i = 0; i < Ks.size() && !aborted; ++i) {
    Moments sel, expected, v_ell, samples;
    std::int64_t outer_samples = 0, inner_total = 0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(Ks[i]); ++k) {
      const auto& rec = results[0].traces[i].records[k];
      outer_samples += rec.M * entry.game.num_players();
    }
    for (const auto& res : results) {
      const RunTrace& t = res.traces[i];
      sel.add(t.res_sq_at_selected);
      samples.add(static_cast<double>(t.records.back().samples_cum));
      inner_total = t.records.back().inner_steps_cum;
      if (cfg.solver.exact_diagnostics) {
        expected.add(*t.res_sq_expected_over_r);
        v_ell.add(*t.v_exact_at_ell);
        if (i + 1 == Ks.size()) {
          auto a = sandwich_violations(t, 1e-10);
          auto b = descent_violations(t, constants.L1_V_alpha, 1e-8);
          sandwich.checked += a.checked;
          sandwich.violations += a.violations;
          sandwich.worst_excess = std::max(sandwich.worst_excess, a.worst_excess);
          descent.checked += b.checked;
          descent.violations += b.violations;
          descent.worst_excess = std::max(descent.worst_excess, b.worst_excess);
        }
      }
    }
    json row = {{"K", Ks[i]},
                {"ell", results[0].traces[i].ell},
                {"mean_res_sq_at_R", sel.mean},
                {"sd_res_sq_at_R", sel.sd},
                {"ci95_half_width", sel.half_width()},
                {"outer_samples", outer_samples},
                {"inner_samples", inner_total},
                {"mean_samples_cum", samples.mean}};
    mean_points.push_back({static_cast<double>(Ks[i]), sel.mean});
    if (cfg.solver.exact_diagnostics) {
      row["mean_res_sq_expected_over_R"] = expected.mean;
      row["mean_v_alpha_at_ell"] = v_ell.mean;
      const double bound =
          averaged_residual_bound(results[0].traces[i], constants, v_ell.mean, cfg.solver.gamma.gamma0);
      row["averaged_residual_bound"] = bound;
      expected_points.push_back({static_cast<double>(Ks[i]), expected.mean});
      report.checks.push_back(make_check("averaged-residual bound K=" + std::to_string(Ks[i]),
                                         "mean ||G(x_R)||^2 vs evaluated bound", sel.mean, bound,
                                         sel.mean <= bound));
    }
    summary["per_K"].push_back(row);
  }
  if (cfg.solver.exact_diagnostics && !aborted) {
    report.violations.push_back(sandwich);
    report.violations.push_back(descent);
  }
  if (Ks.size() >= 3 && !aborted) {
    bool positive = true;
    for (const auto& [K, v] : mean_points) positive = positive && v > 0.0;
    if (positive) {
      const auto band = cfg.slope_band.value_or(std::make_pair(-INFINITY, INFINITY));
      const auto fit = make_slope("slope of mean ||G(x_R)||^2", mean_points, band.first, band.second);
      summary["slope_sampled_R"] = {{"slope", fit.slope}, {"stderr", fit.stderr_}};
      if (!expected_points.empty()) {
        const auto fe = make_slope("slope of mean E_R ||G(x_R)||^2", expected_points, band.first,
                                   band.second);
        summary["slope_expected_over_R"] = {{"slope", fe.slope}, {"stderr", fe.stderr_}};
        if (cfg.slope_band) report.slopes.push_back(fe);
      } else if (cfg.slope_band) {
        report.slopes.push_back(fit);
      }
    }
  }

  SuiteOptions opt;
  opt.alpha = cfg.solver.alpha;
  opt.seed = cfg.solver.seed;
  opt.threads = cfg.threads;
  for (const auto& s : cfg.suites) run_suite(s, entry, opt, report, log);

  json manifest;
  manifest["config"] = json::parse(serialize_config(cfg));
  manifest["game"] = {{"name", entry.game.name},
                      {"params", entry.params},
                      {"quadratic", entry.game.quadratic},
                      {"noise_sigma", entry.game.noise_sigma},
                      {"strongly_monotone", entry.strongly_monotone},
                      {"nonmonotone_regular", entry.nonmonotone_regular},
                      {"regularity_violations", entry.regularity_violations},
                      {"warnings", entry.warnings}};
  if (entry.known_ne) manifest["game"]["known_ne"] = to_std(entry.known_ne->flat());
  manifest["constants"] = constants_json(constants);
  manifest["schedules"] = {{"gamma", cfg.solver.gamma.formula()},
                           {"batch", cfg.solver.batch.formula()},
                           {"eps", cfg.solver.eps.formula()},
                           {"inner", cfg.solver.inner.formula()},
                           {"beta", "beta_i = " + format_double(cfg.solver.beta.scale) +
                                        " / (alpha (i + 1))"},
                           {"selection", "P(R = j) = gamma_j / sum_{i=l}^{K-1} gamma_i, l = "
                                         "ceil(lambda K)"}};
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  write_file(out / "summary.json", summary.dump(2) + "\n");
  const bool checked =
      !report.checks.empty() || !report.slopes.empty() || !report.violations.empty();
  if (checked) {
    write_file(out / "report.json", report.to_json().dump(2) + "\n");
    log << report.summary_table();
  }
  log << "wrote " << out.string() << "\n";
  if (aborted) {
    log << "run aborted: " << summary["aborted"][0]["reason"].get<std::string>() << "\n";
    return kExitCheckFailure;
  }
  return report.all_pass() ? kExitPass : kExitCheckFailure;
}

}  // namespace nashgap

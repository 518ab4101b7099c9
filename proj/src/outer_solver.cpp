#include "nashgap/outer_solver.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <numeric>

namespace nashgap {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

std::int64_t ceil_pos(double v) {
  auto n = static_cast<std::int64_t>(std::ceil(v));
  return n < 1 ? 1 : n;
}

}  // namespace

double GammaRule::at(std::int64_t k) const {
  const double kk = static_cast<double>(k + 1);
  switch (kind) {
    case Kind::Constant: return gamma0;
    case Kind::Diminishing: return gamma0 / std::sqrt(kk);
    case Kind::PowerDiminishing: return gamma0 / std::pow(kk, 0.5 + delta);
  }
  return gamma0;
}

std::string GammaRule::formula() const {
  switch (kind) {
    case Kind::Constant: return "gamma_k = " + fmt(gamma0);
    case Kind::Diminishing: return "gamma_k = " + fmt(gamma0) + " / sqrt(k + 1)";
    case Kind::PowerDiminishing:
      return "gamma_k = " + fmt(gamma0) + " / (k + 1)^" + fmt(0.5 + delta);
  }
  return {};
}

std::int64_t BatchRule::at(std::int64_t k) const {
  const double kk = static_cast<double>(k);
  switch (kind) {
    case Kind::Linear: return ceil_pos(1.0 + a * kk);
    case Kind::Sqrt: return ceil_pos(1.0 + a * std::sqrt(kk));
    case Kind::Fixed: return M;
  }
  return M;
}

std::string BatchRule::formula() const {
  switch (kind) {
    case Kind::Linear: return "M_k = ceil(1 + " + fmt(a) + " k)";
    case Kind::Sqrt: return "M_k = ceil(1 + " + fmt(a) + " sqrt(k))";
    case Kind::Fixed: return "M_k = " + std::to_string(M);
  }
  return {};
}

double EpsRule::at(std::int64_t k) const {
  const double kk = static_cast<double>(k + 1);
  switch (kind) {
    case Kind::Harmonic: return p / kk;
    case Kind::SqrtHarmonic: return p / std::sqrt(kk);
    case Kind::Fixed: return eps;
  }
  return eps;
}

std::string EpsRule::formula() const {
  switch (kind) {
    case Kind::Harmonic: return "eps_k = " + fmt(p) + " / (k + 1)";
    case Kind::SqrtHarmonic: return "eps_k = " + fmt(p) + " / sqrt(k + 1)";
    case Kind::Fixed: return "eps_k = " + fmt(eps);
  }
  return {};
}

std::string InnerRule::formula() const {
  switch (kind) {
    case Kind::Formula: return "T_k = ceil((2 L1V^2 / alpha^2 + 2 D) / eps_k)";
    case Kind::Scaled: return "T_k = ceil(" + fmt(c) + " / eps_k)";
    case Kind::Fixed: return "T_k = " + std::to_string(T);
    case Kind::Exact: return "exact best response";
  }
  return {};
}

void validate(const SolverConfig& cfg, const ConstantSet& constants) {
  if (!(cfg.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (cfg.alpha != constants.alpha)
    throw ConfigError("constants were computed for alpha = " + fmt(constants.alpha) +
                      ", config has alpha = " + fmt(cfg.alpha));
  if (!(cfg.gamma.gamma0 > 0.0)) throw ConfigError("gamma0 must be positive");
  if (!(cfg.gamma.gamma0 < 1.0 / constants.L1_V_alpha))
    throw ConfigError("gamma0 = " + fmt(cfg.gamma.gamma0) + " violates gamma0 < 1/L1_V = " +
                      fmt(1.0 / constants.L1_V_alpha));
  if (cfg.gamma.kind == GammaRule::Kind::PowerDiminishing && !(cfg.gamma.delta > 0.0))
    throw ConfigError("power-diminishing stepsize needs delta > 0");
  if (!(cfg.lambda >= 0.5 && cfg.lambda < 1.0))
    throw ConfigError("lambda = " + fmt(cfg.lambda) + " is outside [0.5, 1)");
  if (!(static_cast<double>(cfg.K) > 2.0 / (1.0 - cfg.lambda)))
    throw ConfigError("K = " + std::to_string(cfg.K) + " violates K > 2/(1 - lambda) = " +
                      fmt(2.0 / (1.0 - cfg.lambda)));
  switch (cfg.batch.kind) {
    case BatchRule::Kind::Linear:
    case BatchRule::Kind::Sqrt:
      if (!(cfg.batch.a > 0.0)) throw ConfigError("batch growth a must be positive");
      break;
    case BatchRule::Kind::Fixed:
      if (cfg.batch.M < 1) throw ConfigError("fixed batch size must be >= 1");
      break;
  }
  if (cfg.eps.kind == EpsRule::Kind::Fixed) {
    if (!(cfg.eps.eps > 0.0)) throw ConfigError("fixed eps must be positive");
  } else if (!(cfg.eps.p > 0.0)) {
    throw ConfigError("inexactness scale p must be positive");
  }
  if (cfg.inner.kind == InnerRule::Kind::Scaled && !(cfg.inner.c > 0.0))
    throw ConfigError("inner step scale c must be positive");
  if (cfg.inner.kind == InnerRule::Kind::Fixed && cfg.inner.T < 1)
    throw ConfigError("fixed inner step count must be >= 1");
  if (!(cfg.beta.scale > 0.0 && cfg.beta.scale <= 0.5))
    throw ConfigError("inner step scale must lie in (0, 0.5]");
  if (!(cfg.exact_tol > 0.0)) throw ConfigError("exact_tol must be positive");
}

std::int64_t selection_start(double lambda, std::int64_t K) {
  auto ell = static_cast<std::int64_t>(std::ceil(lambda * static_cast<double>(K)));
  if (ell > K - 1) ell = K - 1;
  if (ell < 0) ell = 0;
  return ell;
}

Eigen::VectorXd residual_map(const GameSpec& game, const BlockVector& x, double beta,
                             const Eigen::VectorXd& grad) {
  check_conforms(game, x);
  if (!(beta > 0.0)) throw ConfigError("residual map needs beta > 0");
  if (grad.size() != x.size())
    throw ConformanceError("gradient length " + std::to_string(grad.size()) +
                           " does not match n = " + std::to_string(x.size()));
  BlockVector trial = BlockVector::split(x.flat() - grad / beta, x.dims());
  return beta * (x.flat() - project_onto(game, trial).flat());
}

StepResult step(const GameSpec& game, const BlockVector& x_k, std::int64_t k,
                const SolverConfig& cfg, const ConstantSet* constants,
                const RngStream& stream) {
  check_conforms(game, x_k);
  const double gamma = cfg.gamma.at(k);
  const std::int64_t M = cfg.batch.at(k);
  const double eps = cfg.eps.at(k);
  const Eigen::Index N = game.num_players();

  IterationRecord rec;
  rec.k = k;
  rec.gamma = gamma;
  rec.M = M;
  rec.eps = eps;

  Eigen::VectorXd grad;
  BlockVector responder;
  if (cfg.inner.kind == InnerRule::Kind::Exact) {
    responder = solve_all_best_responses_exact(game, x_k, cfg.alpha, cfg.exact_tol);
    grad = gap_gradient_estimate_at(game, x_k, responder, cfg.alpha, M, stream);
  } else {
    InnerConfig inner;
    inner.alpha = cfg.alpha;
    inner.epsilon_target = eps;
    inner.beta = cfg.beta;
    if (cfg.inner.kind == InnerRule::Kind::Formula) {
      if (constants == nullptr)
        throw ConfigError("the formula inner rule needs the constant set");
      inner.l1_v_alpha = constants->L1_V_alpha;
    } else if (cfg.inner.kind == InnerRule::Kind::Scaled) {
      inner.steps_override = ceil_pos(cfg.inner.c / eps);
    } else {
      inner.steps_override = cfg.inner.T;
    }
    for (Eigen::Index nu = 0; nu < N; ++nu) rec.inner_steps += inner_steps(game, nu, inner);
    GradientEstimate est = grad_v_alpha_estimate(game, x_k, inner, M, stream);
    grad = std::move(est.vector);
    responder = std::move(est.responder);
  }
  rec.samples = rec.inner_steps + M * static_cast<std::int64_t>(N);

  if (!finite(grad) || !finite(responder.flat()))
    throw SolverError("non-finite gradient estimate at k = " + std::to_string(k));

  rec.v_alpha = psi_alpha(game, x_k, responder, cfg.alpha);
  rec.res_sq_inexact = residual_map(game, x_k, 1.0 / gamma, grad).squaredNorm();

  if (cfg.exact_diagnostics) {
    BlockVector y = solve_all_best_responses_exact(game, x_k, cfg.alpha, cfg.exact_tol);
    Eigen::VectorXd g = gap_gradient_at(game, x_k, y, cfg.alpha);
    rec.v_exact = psi_alpha(game, x_k, y, cfg.alpha);
    rec.err_sq = (grad - g).squaredNorm();
    rec.res_sq_exact = residual_map(game, x_k, 1.0 / cfg.gamma.gamma0, g).squaredNorm();
    rec.res_sq_exact_beta_k = residual_map(game, x_k, 1.0 / gamma, g).squaredNorm();
  }

  BlockVector next =
      project_onto(game, BlockVector::split(x_k.flat() - gamma * grad, x_k.dims()));
  if (!finite(next.flat()) || !std::isfinite(rec.v_alpha))
    throw SolverError("non-finite iterate at k = " + std::to_string(k));
  return {std::move(next), rec};
}

std::vector<double> iterate_pmf(const GammaRule& gamma, std::int64_t ell, std::int64_t K) {
  if (K <= ell)
    throw ConfigError("empty selection support: K = " + std::to_string(K) +
                      " <= l = " + std::to_string(ell));
  if (ell < 0) throw ConfigError("selection start must be nonnegative");
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(K - ell));
  for (std::int64_t j = ell; j < K; ++j) w.push_back(gamma.at(j));
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

std::int64_t select_random_iterate(const GammaRule& gamma, std::int64_t ell, std::int64_t K,
                                   const RngStream& stream) {
  const std::vector<double> pmf = iterate_pmf(gamma, ell, K);
  const double u = stream.uniform(0);
  double cum = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    cum += pmf[i];
    if (u < cum) return ell + static_cast<std::int64_t>(i);
  }
  return K - 1;
}

RegularityCheck check_regularity(const GameSpec& game, const BlockVector& x, double alpha,
                                 double tol) {
  check_conforms(game, x);
  BlockVector y = solve_all_best_responses_exact(game, x, alpha);
  const Eigen::VectorXd diff = x.flat() - y.flat();
  if (diff.norm() <= tol) return {true, 0.0};
  Eigen::VectorXd s = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    const auto& p = game.players[static_cast<std::size_t>(nu)];
    s += p.grad(x) - p.grad(swap_block(x, nu, y.block(nu)));
  }
  const double value = s.dot(diff);
  return {value > 0.0, value};
}

BlockVector starting_point(const GameSpec& game, const SolverConfig& cfg) {
  if (!cfg.x0) return origin_projection(game);
  const auto& v = *cfg.x0;
  if (static_cast<Eigen::Index>(v.size()) != game.dim())
    throw ConfigError("x0 has length " + std::to_string(v.size()) + ", game has n = " +
                      std::to_string(game.dim()));
  BlockVector x = BlockVector::split(
      Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
      game.dims());
  if (!is_feasible(game, x, 1e-12)) throw ConfigError("x0 is not feasible");
  return x;
}

namespace {

struct Trajectory {
  std::vector<IterationRecord> records;
  std::vector<BlockVector> iterates;  // x_0 .. x_{K_max}
};

Trajectory simulate(const GameSpec& game, const SolverConfig& cfg, std::int64_t K,
                    const RngStream& rep_stream) {
  std::optional<ConstantSet> constants;
  if (cfg.inner.kind == InnerRule::Kind::Formula) constants = compute_constants(game, cfg.alpha);

  Trajectory t;
  t.records.reserve(static_cast<std::size_t>(K));
  t.iterates.reserve(static_cast<std::size_t>(K + 1));
  t.iterates.push_back(starting_point(game, cfg));
  std::int64_t inner_cum = 0;
  std::int64_t samples_cum = 0;
  for (std::int64_t k = 0; k < K; ++k) {
    StepResult r;
    try {
      r = step(game, t.iterates.back(), k, cfg, constants ? &*constants : nullptr,
               rep_stream.child(static_cast<std::uint64_t>(k)));
    } catch (const SolverError& e) {
      RunTrace partial;
      partial.records = std::move(t.records);
      partial.final_point = t.iterates.back();
      throw RunAborted(e.what(), std::move(partial));
    }
    inner_cum += r.record.inner_steps;
    samples_cum += r.record.samples;
    r.record.inner_steps_cum = inner_cum;
    r.record.samples_cum = samples_cum;
    t.records.push_back(r.record);
    t.iterates.push_back(std::move(r.next));
  }
  return t;
}

RunTrace finalize(const GameSpec& game, const SolverConfig& cfg, const Trajectory& t,
                  std::int64_t K, const RngStream& rep_stream) {
  RunTrace trace;
  trace.records.assign(t.records.begin(), t.records.begin() + K);
  trace.final_point = t.iterates[static_cast<std::size_t>(K)];
  trace.ell = selection_start(cfg.lambda, K);
  trace.selected_index = select_random_iterate(
      cfg.gamma, trace.ell, K, rep_stream.child(stream_tag::kIterateSelection));
  trace.selected_point = t.iterates[static_cast<std::size_t>(trace.selected_index)];

  const auto& sel = trace.records[static_cast<std::size_t>(trace.selected_index)];
  if (sel.res_sq_exact) {
    trace.res_sq_at_selected = *sel.res_sq_exact;
  } else {
    Eigen::VectorXd g = grad_v_alpha_exact(game, trace.selected_point, cfg.alpha, cfg.exact_tol);
    trace.res_sq_at_selected =
        residual_map(game, trace.selected_point, 1.0 / cfg.gamma.gamma0, g).squaredNorm();
  }

  if (cfg.exact_diagnostics) {
    const std::vector<double> pmf = iterate_pmf(cfg.gamma, trace.ell, K);
    double expected = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i)
      expected += pmf[i] * *trace.records[static_cast<std::size_t>(trace.ell) + i].res_sq_exact;
    trace.res_sq_expected_over_r = expected;
    trace.v_exact_at_ell = trace.records[static_cast<std::size_t>(trace.ell)].v_exact;
    if (K < static_cast<std::int64_t>(t.records.size())) {
      trace.v_exact_final = t.records[static_cast<std::size_t>(K)].v_exact;
    } else {
      trace.v_exact_final = v_alpha_exact(game, trace.final_point, cfg.alpha, cfg.exact_tol).value;
    }
  }
  return trace;
}

}  // namespace

RunTrace run(const GameSpec& game, const SolverConfig& cfg, std::uint64_t rep) {
  if (cfg.K < 1) throw ConfigError("K must be >= 1");
  const RngStream rep_stream = RngStream(cfg.seed).child(rep);
  return finalize(game, cfg, simulate(game, cfg, cfg.K, rep_stream), cfg.K, rep_stream);
}

std::vector<RunTrace> run_grid(const GameSpec& game, const SolverConfig& cfg,
                               const std::vector<std::int64_t>& Ks, std::uint64_t rep) {
  if (Ks.empty()) return {};
  std::int64_t K_max = 0;
  for (auto K : Ks) {
    if (K < 1) throw ConfigError("K must be >= 1");
    K_max = std::max(K_max, K);
  }
  const RngStream rep_stream = RngStream(cfg.seed).child(rep);
  const Trajectory t = simulate(game, cfg, K_max, rep_stream);
  std::vector<RunTrace> out;
  out.reserve(Ks.size());
  for (auto K : Ks) out.push_back(finalize(game, cfg, t, K, rep_stream));
  return out;
}

}  // namespace nashgap

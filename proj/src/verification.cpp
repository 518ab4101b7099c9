#include "nashgap/verification.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace nashgap {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool VerificationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  for (const auto& s : slopes)
    if (!s.pass) return false;
  for (const auto& v : violations)
    if (v.violations != 0) return false;
  return true;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["all_pass"] = all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name}, {"description", c.description},
                           {"measured", c.measured}, {"bound", c.bound},
                           {"estimate", c.estimate}, {"pass", c.pass}, {"extra", c.extra}});
  }
  j["slopes"] = nlohmann::json::array();
  for (const auto& s : slopes) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [K, v] : s.points) pts.push_back({K, v});
    j["slopes"].push_back({{"name", s.name}, {"slope", s.slope}, {"stderr", s.stderr_},
                           {"intercept", s.intercept}, {"band", {s.low, s.high}},
                           {"pass", s.pass}, {"points", pts}});
  }
  j["violations"] = nlohmann::json::array();
  for (const auto& v : violations) {
    j["violations"].push_back({{"name", v.name}, {"checked", v.checked},
                               {"violations", v.violations}, {"worst_excess", v.worst_excess}});
  }
  return j;
}

std::string VerificationReport::summary_table() const {
  std::ostringstream out;
  char line[256];
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-4s %-40s measured %-12.6g bound %-12.6g\n",
                  c.pass ? "ok" : "FAIL", c.name.c_str(), c.measured, c.bound);
    out << line;
  }
  for (const auto& s : slopes) {
    std::snprintf(line, sizeof line, "%-4s %-40s slope %.4f +- %.4f in [%.2f, %.2f]\n",
                  s.pass ? "ok" : "FAIL", s.name.c_str(), s.slope, s.stderr_, s.low, s.high);
    out << line;
  }
  for (const auto& v : violations) {
    std::snprintf(line, sizeof line, "%-4s %-40s %lld / %lld violated, worst excess %.3g\n",
                  v.violations == 0 ? "ok" : "FAIL", v.name.c_str(),
                  static_cast<long long>(v.violations), static_cast<long long>(v.checked),
                  v.worst_excess);
    out << line;
  }
  return out.str();
}

double vi_residual(const GameSpec& game, const BlockVector& x) {
  const Eigen::VectorXd F = pseudo_gradient(game, x);
  BlockVector trial = BlockVector::split(x.flat() - F, x.dims());
  return (x.flat() - project_onto(game, trial).flat()).norm();
}

BlockVector quadratic_ne_oracle(const GameSpec& game) {
  if (!game.quadratic) throw ConfigError("NE oracle needs a quadratic game, got '" + game.name + "'");
  const auto dims = game.dims();
  const Eigen::Index n = game.dim();
  BlockVector x(dims);
  const Eigen::VectorXd f0 = pseudo_gradient(game, x);
  Eigen::MatrixXd J(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    J.col(i) = pseudo_gradient(game, BlockVector::split(e, dims)) - f0;
  }

  constexpr double kTol = 1e-10;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
  if (lu.isInvertible()) {
    BlockVector cand = BlockVector::split(lu.solve(-f0), dims);
    if (is_feasible(game, cand, 1e-12)) {
      cand = project_onto(game, cand);
      if (vi_residual(game, cand) <= kTol) return cand;
    }
  }

  const Eigen::MatrixXd S = 0.5 * (J + J.transpose());
  const double mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues().minCoeff();
  if (!(mu > 0.0))
    throw SolverError("NE oracle: the unconstrained solution is infeasible and F is not "
                      "strongly monotone, so the fixed-point fallback does not apply");
  const double L = J.operatorNorm();
  const double tau = mu / (L * L);
  BlockVector y = origin_projection(game);
  for (std::int64_t it = 0; it < 50'000'000; ++it) {
    BlockVector next = project_onto(
        game, BlockVector::split(y.flat() - tau * (J * y.flat() + f0), dims));
    const double change = (next.flat() - y.flat()).norm();
    y = std::move(next);
    if (change <= 1e-15 * (1.0 + y.flat().norm())) break;
  }
  const double r = vi_residual(game, y);
  if (!(r <= kTol)) throw SolverError("NE oracle: VI residual " + format_double(r) + " > 1e-10");
  return y;
}

double brute_force_gap(const GameSpec& game, const BlockVector& x, double alpha,
                       double grid_step) {
  check_conforms(game, x);
  if (!(grid_step > 0.0)) throw ConfigError("brute_force_gap: grid_step must be > 0");
  constexpr double kMaxPoints = 1e7;
  double total = 0.0;
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    const auto idx = static_cast<std::size_t>(nu);
    const BoxSet<double>* box = game.sets[idx].as_box();
    if (box == nullptr) throw ConfigError("brute_force_gap: box sets only");
    const Eigen::Index d = box->lower.size();
    std::vector<std::vector<double>> axes(static_cast<std::size_t>(d));
    double count = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double lo = box->lower[i];
      const double hi = box->upper[i];
      auto& ax = axes[static_cast<std::size_t>(i)];
      const auto m = static_cast<std::int64_t>(std::floor((hi - lo) / grid_step + 1e-9));
      for (std::int64_t j = 0; j <= m; ++j) ax.push_back(lo + static_cast<double>(j) * grid_step);
      if (ax.back() < hi - 1e-12) ax.push_back(hi);
      count *= static_cast<double>(ax.size());
    }
    if (count > kMaxPoints)
      throw ConfigError("brute_force_gap: " + format_double(count) + " grid points exceed 1e7");

    const auto& p = game.players[idx];
    const double base = p.value(x);
    const Eigen::VectorXd xn = x.block(nu);
    BlockVector work = x;
    std::vector<std::size_t> pos(static_cast<std::size_t>(d), 0);
    double best = -INFINITY;
    for (;;) {
      for (Eigen::Index i = 0; i < d; ++i)
        work.block(nu)[i] = axes[static_cast<std::size_t>(i)][pos[static_cast<std::size_t>(i)]];
      const double v = base - p.value(work) - 0.5 * alpha * (xn - work.block(nu)).squaredNorm();
      best = std::max(best, v);
      std::size_t i = 0;
      while (i < pos.size() && ++pos[i] == axes[i].size()) pos[i++] = 0;
      if (i == pos.size()) break;
    }
    total += best;
  }
  return total;
}

Eigen::VectorXd finite_difference_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw ConfigError("finite_difference_grad: h must be > 0");
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double fp = f(p);
    p[i] = x[i] - h;
    const double fm = f(p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw ConfigError("fit_loglog_slope: need at least 3 points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [K, v] : points) {
    if (!(K > 0.0) || !(v > 0.0)) throw ConfigError("fit_loglog_slope: values must be positive");
    mx += std::log(K);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [K, v] : points) {
    sxx += (std::log(K) - mx) * (std::log(K) - mx);
    sxy += (std::log(K) - mx) * (std::log(v) - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit_loglog_slope: K values must differ");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [K, v] : points) {
    const double r = std::log(v) - fit.intercept - fit.slope * std::log(K);
    ssr += r * r;
  }
  fit.stderr_ = std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

BlockVector random_feasible_point(const GameSpec& game, const RngStream& stream,
                                  std::uint64_t i) {
  const RngStream s = stream.child(i);
  BlockVector x(game.dims());
  std::uint64_t counter = 0;
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    const auto& set = game.sets[static_cast<std::size_t>(nu)];
    auto blk = x.block(nu);
    const Eigen::Index d = blk.size();
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, BoxSet<double>>) {
            for (Eigen::Index j = 0; j < d; ++j)
              blk[j] = k.lower[j] + (k.upper[j] - k.lower[j]) * s.uniform(counter++);
          } else if constexpr (std::is_same_v<K, BallSet<double>>) {
            const Eigen::VectorXd dir =
                draw_noise(s.child(1000 + static_cast<std::uint64_t>(nu)), d).values;
            const double r = k.radius * std::pow(s.uniform(counter++), 1.0 / static_cast<double>(d));
            const double norm = dir.norm();
            blk = k.center + (norm > 0.0 ? r / norm : 0.0) * dir;
          } else {
            Eigen::VectorXd w(d);
            for (Eigen::Index j = 0; j < d; ++j) w[j] = -std::log(1.0 - s.uniform(counter++));
            blk = k.scale * w / w.sum();
          }
        },
        set.kind());
  }
  return x;
}

CheckResult moment_check(const GameSpec& game, const BlockVector& x,
                         const MomentCheckConfig& cfg, const RngStream& stream) {
  if (cfg.reps < 2) throw ConfigError("moment_check: need at least 2 replications");
  const auto eb = error_bound_constants(game, cfg.alpha);
  const Eigen::VectorXd exact = grad_v_alpha_exact(game, x, cfg.alpha, 1e-12);

  InnerConfig inner;
  inner.alpha = cfg.alpha;
  inner.epsilon_target = cfg.epsilon;
  if (cfg.inner_steps) {
    inner.steps_override = cfg.inner_steps;
  } else if (!cfg.exact_inner) {
    inner.l1_v_alpha = smoothness_v_alpha(game, cfg.alpha);
  }
  BlockVector y_exact;
  if (cfg.exact_inner) y_exact = solve_all_best_responses_exact(game, x, cfg.alpha, 1e-12);

  double mean = 0.0, m2 = 0.0;
  for (std::int64_t r = 0; r < cfg.reps; ++r) {
    const RngStream s = stream.child(static_cast<std::uint64_t>(r));
    Eigen::VectorXd est;
    if (cfg.exact_inner) {
      est = gap_gradient_estimate_at(game, x, y_exact, cfg.alpha, cfg.M, s);
    } else {
      est = grad_v_alpha_estimate(game, x, inner, cfg.M, s).vector;
    }
    const double e2 = (est - exact).squaredNorm();
    const double delta = e2 - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (e2 - mean);
  }
  const double sd = std::sqrt(m2 / static_cast<double>(cfg.reps - 1));
  CheckResult c;
  char name[64];
  std::snprintf(name, sizeof name, "moment eps=%g M=%lld", cfg.epsilon,
                static_cast<long long>(cfg.M));
  c.name = name;
  c.description = "95% upper confidence bound of E||e||^2 vs rho/M + mu eps";
  c.estimate = mean;
  c.measured = mean + 1.96 * sd / std::sqrt(static_cast<double>(cfg.reps));
  c.bound = eb.rho / static_cast<double>(cfg.M) + eb.mu * cfg.epsilon;
  c.pass = c.measured <= c.bound;
  c.extra["bound_4alpha_sq"] = eb.rho / static_cast<double>(cfg.M) +
                               (eb.mu - 4.0 * cfg.alpha + 4.0 * cfg.alpha * cfg.alpha) * cfg.epsilon;
  return c;
}

InnerContractResult inner_contract(const GameSpec& game, const BlockVector& x,
                                   const InnerConfig& inner, std::int64_t reps,
                                   const RngStream& stream) {
  if (reps < 2) throw ConfigError("inner_contract: need at least 2 replications");
  const BlockVector y = solve_all_best_responses_exact(game, x, inner.alpha, 1e-12);
  InnerContractResult res;
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) res.steps += inner_steps(game, nu, inner);
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t r = 0; r < reps; ++r) {
    const BlockVector z =
        solve_all_best_responses(game, x, inner, stream.child(static_cast<std::uint64_t>(r)));
    const double e2 = (z.flat() - y.flat()).squaredNorm();
    const double delta = e2 - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (e2 - mean);
  }
  res.mean = mean;
  res.upper95 =
      mean + 1.96 * std::sqrt(m2 / static_cast<double>(reps - 1)) / std::sqrt(static_cast<double>(reps));
  return res;
}

LipschitzSweep lipschitz_sweep(const GameSpec& game, const ConstantSet& c, std::int64_t pairs,
                               const RngStream& stream) {
  // Absolute slack for the 1e-12 exact-solver tolerance.
  constexpr double kSlack = 1e-9;
  LipschitzSweep out;
  for (std::int64_t i = 0; i < pairs; ++i) {
    const RngStream s = stream.child(static_cast<std::uint64_t>(i));
    const BlockVector x1 = random_feasible_point(game, s, 0);
    const BlockVector x2 = random_feasible_point(game, s, 1);
    const double dx = (x1.flat() - x2.flat()).norm();
    if (dx < 1e-12) continue;
    ++out.pairs;
    const BlockVector y1 = solve_all_best_responses_exact(game, x1, c.alpha, 1e-12);
    const BlockVector y2 = solve_all_best_responses_exact(game, x2, c.alpha, 1e-12);
    const double dy = (y1.flat() - y2.flat()).norm();
    const double dv =
        std::abs(psi_alpha(game, x1, y1, c.alpha) - psi_alpha(game, x2, y2, c.alpha));
    const double dg = (gap_gradient_at(game, x1, y1, c.alpha) -
                       gap_gradient_at(game, x2, y2, c.alpha)).norm();
    out.max_y = std::max(out.max_y, dy / dx);
    out.max_v = std::max(out.max_v, dv / dx);
    out.max_grad = std::max(out.max_grad, dg / dx);
    if (dy > c.L0_y_alpha * dx + kSlack) ++out.violations_y;
    if (dv > c.L0_V_alpha * dx + kSlack) ++out.violations_v;
    if (dg > c.L1_V_alpha * dx + kSlack) ++out.violations_grad;
  }
  return out;
}

ViolationCount sandwich_violations(const RunTrace& trace, double slack) {
  ViolationCount v;
  v.name = "residual sandwich";
  v.worst_excess = -INFINITY;
  for (const auto& r : trace.records) {
    if (!r.res_sq_exact_beta_k || !r.err_sq)
      throw ConfigError("sandwich check needs exact diagnostics");
    const double excess = *r.res_sq_exact_beta_k - 2.0 * r.res_sq_inexact - 2.0 * *r.err_sq;
    ++v.checked;
    v.worst_excess = std::max(v.worst_excess, excess);
    if (excess > slack) ++v.violations;
  }
  return v;
}

ViolationCount descent_violations(const RunTrace& trace, double L1_V_alpha, double slack) {
  ViolationCount v;
  v.name = "descent inequality";
  v.worst_excess = -INFINITY;
  const auto& rs = trace.records;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const auto& r = rs[k];
    if (!r.v_exact || !r.res_sq_exact || !r.err_sq)
      throw ConfigError("descent check needs exact diagnostics");
    const double v_next = k + 1 < rs.size() ? *rs[k + 1].v_exact : trace.v_exact_final.value();
    const double g = r.gamma;
    const double rhs = *r.v_exact - (1.0 - L1_V_alpha * g) * (g / 4.0) * *r.res_sq_exact +
                       (1.0 - L1_V_alpha * g / 2.0) * g * *r.err_sq;
    const double excess = v_next - rhs;
    ++v.checked;
    v.worst_excess = std::max(v.worst_excess, excess);
    if (excess > slack) ++v.violations;
  }
  return v;
}

double averaged_residual_bound(const RunTrace& schedule, const ConstantSet& c,
                               double mean_v_at_ell, double gamma0) {
  double num = 0.0, sum_gamma = 0.0;
  for (std::size_t k = static_cast<std::size_t>(schedule.ell); k < schedule.records.size(); ++k) {
    const auto& r = schedule.records[k];
    num += r.gamma * (c.rho / static_cast<double>(r.M) + c.mu * r.eps);
    sum_gamma += r.gamma;
  }
  return (4.0 * num + mean_v_at_ell) / ((1.0 - c.L1_V_alpha * gamma0) * sum_gamma);
}

}  // namespace nashgap

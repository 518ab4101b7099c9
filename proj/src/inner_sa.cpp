#include "nashgap/inner_sa.hpp"

#include <cmath>

namespace nashgap {

std::int64_t sa_iteration_count(double epsilon, double l1_v_alpha, double alpha,
                                double set_diam_sq) {
  if (!(epsilon > 0.0)) throw ConfigError("sa_iteration_count: epsilon must be > 0");
  if (!(alpha > 0.0)) throw ConfigError("sa_iteration_count: alpha must be > 0");
  if (!(l1_v_alpha > 0.0) || !(set_diam_sq >= 0.0)) {
    throw ConfigError("sa_iteration_count: L1 must be > 0 and D >= 0");
  }
  const double raw =
      (2.0 * l1_v_alpha * l1_v_alpha / (alpha * alpha) + 2.0 * set_diam_sq) / epsilon;
  // Absorb the rounding of exact products such as 4 / 0.1.
  return static_cast<std::int64_t>(std::ceil(raw * (1.0 - 4.0 * 2.220446049250313e-16)));
}

std::int64_t inner_steps(const GameSpec& game, Eigen::Index nu, const InnerConfig& cfg) {
  if (cfg.steps_override) {
    if (*cfg.steps_override < 0) throw ConfigError("inner steps_override must be >= 0");
    return *cfg.steps_override;
  }
  return sa_iteration_count(cfg.epsilon_target, cfg.l1_v_alpha, cfg.alpha,
                            squared_diameter(game.sets.at(static_cast<std::size_t>(nu))));
}

Eigen::VectorXd solve_best_response_sa(const GameSpec& game, const BlockVector& x,
                                       Eigen::Index nu, const InnerConfig& cfg,
                                       const RngStream& stream) {
  check_conforms(game, x);
  if (!(cfg.alpha > 0.0)) throw ConfigError("inner SA: alpha must be > 0");
  const auto& player = game.players.at(static_cast<std::size_t>(nu));
  const auto& set = game.sets[static_cast<std::size_t>(nu)];
  const std::int64_t T = inner_steps(game, nu, cfg);
  const Eigen::VectorXd anchor = x.block(nu);

  BlockVector work = x;
  Eigen::VectorXd z = anchor;
  for (std::int64_t i = 0; i < T; ++i) {
    work.block(nu) = z;
    const NoiseDraw xi = draw_noise(stream.child(static_cast<std::uint64_t>(i)), player.noise_dim);
    const Eigen::VectorXd g = own_part(work, nu, player.sampled_grad(work, xi));
    z = project(set, z - cfg.beta.at(i, cfg.alpha) * (g + cfg.alpha * (z - anchor)));
  }
  return z;
}

Eigen::VectorXd solve_best_response_exact(const GameSpec& game, const BlockVector& x,
                                          Eigen::Index nu, double alpha, double tol) {
  check_conforms(game, x);
  if (!(tol > 0.0)) throw ConfigError("exact best response: tol must be > 0");
  if (!(alpha > 0.0)) throw ConfigError("exact best response: alpha must be > 0");
  const auto idx = static_cast<std::size_t>(nu);
  const auto& player = game.players.at(idx);
  const auto& set = game.sets[idx];
  const double step = 1.0 / (game.smoothness[idx].L1 + alpha);
  const Eigen::VectorXd anchor = x.block(nu);

  constexpr std::int64_t kMaxIterations = 5'000'000;
  BlockVector work = x;
  Eigen::VectorXd y = anchor;
  for (std::int64_t it = 0; it < kMaxIterations; ++it) {
    work.block(nu) = y;
    const Eigen::VectorXd g = own_part(work, nu, player.grad(work)) + alpha * (y - anchor);
    Eigen::VectorXd next = project(set, y - step * g);
    const double residual = (y - next).norm() / step;
    if (!std::isfinite(residual)) throw SolverError("exact best response: non-finite residual");
    if (residual <= tol) return y;
    y = std::move(next);
  }
  throw SolverError("exact best response: no convergence for player " + std::to_string(nu));
}

BlockVector solve_all_best_responses(const GameSpec& game, const BlockVector& x,
                                     const InnerConfig& cfg, const RngStream& stream) {
  BlockVector y = x;
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    y.block(nu) = solve_best_response_sa(game, x, nu, cfg, inner_stream(stream, nu));
  }
  return y;
}

BlockVector solve_all_best_responses_exact(const GameSpec& game, const BlockVector& x,
                                           double alpha, double tol) {
  BlockVector y = x;
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    y.block(nu) = solve_best_response_exact(game, x, nu, alpha, tol);
  }
  return y;
}

}  // namespace nashgap

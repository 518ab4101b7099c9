#include "nashgap/ni_gap.hpp"

#include "nashgap/stochastic_oracle.hpp"

namespace nashgap {

namespace {

void check_pair(const GameSpec& game, const BlockVector& x, const BlockVector& y) {
  check_conforms(game, x);
  check_conforms(game, y);
}

}  // namespace

double psi(const GameSpec& game, const BlockVector& x, const BlockVector& y) {
  check_pair(game, x, y);
  double total = 0.0;
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    const auto& p = game.players[static_cast<std::size_t>(nu)];
    total += p.value(x) - p.value(swap_block(x, nu, y.block(nu)));
  }
  return total;
}

double psi_alpha(const GameSpec& game, const BlockVector& x, const BlockVector& y,
                 double alpha) {
  if (alpha < 0.0) throw ConfigError("psi_alpha: alpha must be >= 0");
  return psi(game, x, y) - 0.5 * alpha * (x.flat() - y.flat()).squaredNorm();
}

GapEvaluation v_alpha_exact(const GameSpec& game, const BlockVector& x, double alpha,
                            double tol) {
  BlockVector y = solve_all_best_responses_exact(game, x, alpha, tol);
  const double value = psi_alpha(game, x, y, alpha);
  return GapEvaluation{value, std::move(y), Exactness::Exact, 0.0};
}

Eigen::VectorXd gap_gradient_at(const GameSpec& game, const BlockVector& x,
                                const BlockVector& y, double alpha) {
  check_pair(game, x, y);
  Eigen::VectorXd g = -alpha * (x.flat() - y.flat());
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    const auto& p = game.players[static_cast<std::size_t>(nu)];
    const BlockVector mixed = swap_block(x, nu, y.block(nu));
    const Eigen::VectorXd at_mixed = p.grad(mixed);
    g += p.grad(x) - at_mixed;
    g.segment(x.offset(nu), x.block_dim(nu)) += own_part(x, nu, at_mixed);
  }
  return g;
}

Eigen::VectorXd grad_v_alpha_exact(const GameSpec& game, const BlockVector& x, double alpha,
                                   double tol) {
  const BlockVector y = solve_all_best_responses_exact(game, x, alpha, tol);
  return gap_gradient_at(game, x, y, alpha);
}

Eigen::VectorXd gap_gradient_estimate_at(const GameSpec& game, const BlockVector& x,
                                         const BlockVector& y, double alpha, std::int64_t M,
                                         const RngStream& stream) {
  check_pair(game, x, y);
  if (M < 1) throw ConfigError("gradient estimate: M must be >= 1");
  Eigen::VectorXd g = -alpha * (x.flat() - y.flat());
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    const auto& p = game.players[static_cast<std::size_t>(nu)];
    const RngStream samples = batch_stream(stream, nu);
    const BlockVector mixed = swap_block(x, nu, y.block(nu));
    const Eigen::VectorXd at_mixed = batch_gradient(p, mixed, M, samples);
    g += batch_gradient(p, x, M, samples) - at_mixed;
    g.segment(x.offset(nu), x.block_dim(nu)) += own_part(x, nu, at_mixed);
  }
  return g;
}

GradientEstimate grad_v_alpha_estimate(const GameSpec& game, const BlockVector& x,
                                       const InnerConfig& inner, std::int64_t M,
                                       const RngStream& stream) {
  if (!(inner.epsilon_target > 0.0)) throw ConfigError("gradient estimate: epsilon must be > 0");
  BlockVector y = solve_all_best_responses(game, x, inner, stream);
  Eigen::VectorXd v = gap_gradient_estimate_at(game, x, y, inner.alpha, M, stream);
  return GradientEstimate{std::move(v), inner.epsilon_target, M, std::move(y)};
}

Eigen::VectorXd gradient_error(const GameSpec& game, const BlockVector& x,
                               const GradientEstimate& estimate, double alpha, double tol) {
  return estimate.vector - grad_v_alpha_exact(game, x, alpha, tol);
}

}  // namespace nashgap

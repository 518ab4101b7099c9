#include "nashgap/constants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nashgap {

double lipschitz_y_alpha(double alpha, double LG) {
  if (!(LG >= 0.0)) throw ConfigError("L_G must be nonnegative");
  if (LG == 0.0) {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    return 1.0;
  }
  if (!(alpha > LG)) {
    std::ostringstream msg;
    msg << "alpha = " << alpha << " <= L_G = " << LG
        << ": violates the alpha > L_G hypothesis of the best-response Lipschitz bound";
    throw ConfigError(msg.str());
  }
  return (alpha + LG) / (alpha - LG);
}

double lipschitz_y_alpha(const GameSpec& game, double alpha) {
  double worst = 1.0;
  for (const auto& s : game.smoothness) worst = std::max(worst, lipschitz_y_alpha(alpha, s.LG));
  return worst;
}

double lipschitz_v_alpha(const GameSpec& game, double alpha) {
  const double ly = lipschitz_y_alpha(game, alpha);
  double total = 0.0;
  for (std::size_t nu = 0; nu < game.players.size(); ++nu) {
    const double C = diameter(game.sets[nu]);
    total += game.smoothness[nu].L0 * (1.0 + std::sqrt(1.0 + ly * ly)) +
             4.0 * alpha * C * (1.0 + ly);
  }
  return total;
}

double smoothness_v_alpha(const GameSpec& game, double alpha) {
  const double ly = lipschitz_y_alpha(game, alpha);
  double total = 0.0;
  for (const auto& s : game.smoothness) total += s.L1 + s.L1 * std::sqrt(1.0 + ly * ly);
  return 2.0 * total + alpha * (1.0 + ly);
}

ErrorBoundConstants error_bound_constants(const GameSpec& game, double alpha) {
  const double N = static_cast<double>(game.num_players());
  const double sigma2 = game.noise_sigma * game.noise_sigma;
  double sum_l1_sq = 0.0;
  for (const auto& s : game.smoothness) sum_l1_sq += s.L1 * s.L1;
  return {(3.0 * N + 2.0) * N * sigma2, (2.0 * N + 2.0) * sum_l1_sq + 4.0 * alpha};
}

ConstantSet compute_constants(const GameSpec& game, double alpha) {
  ConstantSet c;
  c.alpha = alpha;
  c.L0_y_alpha = lipschitz_y_alpha(game, alpha);
  c.L0_V_alpha = lipschitz_v_alpha(game, alpha);
  c.L1_V_alpha = smoothness_v_alpha(game, alpha);
  const auto eb = error_bound_constants(game, alpha);
  c.rho = eb.rho;
  c.mu = eb.mu;
  c.mu_alpha_squared = eb.mu - 4.0 * alpha + 4.0 * alpha * alpha;
  for (std::size_t nu = 0; nu < game.players.size(); ++nu) {
    const auto& s = game.smoothness[nu];
    const double D = squared_diameter(game.sets[nu]);
    c.per_player.push_back({s.L0, s.L1, s.LG, std::sqrt(D), D});
  }
  return c;
}

}  // namespace nashgap

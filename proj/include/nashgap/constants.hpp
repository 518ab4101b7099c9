#pragma once

#include <vector>

#include "nashgap/game.hpp"

namespace nashgap {

struct PlayerConstants {
  double L0 = 0.0;
  double L1 = 0.0;
  double LG = 0.0;
  /// Linear diameter sqrt(D) of X^nu.
  double C = 0.0;
  /// Squared diameter D of X^nu.
  double D = 0.0;
};

/// Lipschitz and error-bound constants of the regularized gap for one alpha.
struct ConstantSet {
  double alpha = 0.0;
  double L0_y_alpha = 0.0;
  double L0_V_alpha = 0.0;
  double L1_V_alpha = 0.0;
  /// (3N + 2) N sigma^2
  double rho = 0.0;
  /// (2N + 2) sum (L1^nu)^2 + 4 alpha
  double mu = 0.0;
  /// Same with 4 alpha^2, the coefficient the moment bound's derivation produces.
  double mu_alpha_squared = 0.0;
  std::vector<PlayerConstants> per_player;
};

/// (alpha + LG) / (alpha - LG); 1 when LG = 0. Throws ConfigError unless alpha > LG.
double lipschitz_y_alpha(double alpha, double LG);

/// Worst-case best-response constant over the players.
double lipschitz_y_alpha(const GameSpec& game, double alpha);

/// sum_nu ( L0^nu (1 + sqrt(1 + L0y^2)) + 4 alpha C^nu (1 + L0y) ).
double lipschitz_v_alpha(const GameSpec& game, double alpha);

/// 2 sum_nu ( L1^nu + L1^nu sqrt(1 + L0y^2) ) + alpha (1 + L0y).
double smoothness_v_alpha(const GameSpec& game, double alpha);

struct ErrorBoundConstants {
  double rho = 0.0;
  double mu = 0.0;
};

ErrorBoundConstants error_bound_constants(const GameSpec& game, double alpha);

ConstantSet compute_constants(const GameSpec& game, double alpha);

/// rho / M + mu * eps: bound on E||e_{eps,M}||^2.
inline double moment_bound(const ConstantSet& c, double M, double eps) {
  return c.rho / M + c.mu * eps;
}

}  // namespace nashgap

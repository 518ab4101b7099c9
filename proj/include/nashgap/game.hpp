#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "nashgap/block_vector.hpp"
#include "nashgap/feasible_set.hpp"
#include "nashgap/rng.hpp"

namespace nashgap {

/// Cost of one player. Both gradients are over the full joint vector (length n);
/// callers extract the own block where needed. All callbacks must be pure.
struct PlayerObjective {
  std::function<double(const BlockVector&)> value;
  std::function<double(const BlockVector&, const NoiseDraw&)> sampled_value;
  std::function<Eigen::VectorXd(const BlockVector&)> grad;
  std::function<Eigen::VectorXd(const BlockVector&, const NoiseDraw&)> sampled_grad;
  Eigen::Index own_block = 0;
  Eigen::Index noise_dim = 1;
};

/// Per-player smoothness metadata: L0 (Lipschitz constant of theta_nu on X),
/// L1 (Lipschitz constant of the full gradient), LG (Lipschitz constant of the
/// own-block gradient in the joint argument).
struct PlayerSmoothness {
  double L0 = 0.0;
  double L1 = 0.0;
  double LG = 0.0;
};

/// Stochastic N-player game (Theta, X) with X = X^1 x ... x X^N.
struct GameSpec {
  std::string name;
  std::vector<PlayerObjective> players;
  std::vector<FeasibleSet> sets;
  std::vector<PlayerSmoothness> smoothness;
  /// Bound on E||grad theta_nu - sampled grad||^2 is noise_sigma^2.
  double noise_sigma = 0.0;
  /// Every theta_nu is a quadratic polynomial (F affine).
  bool quadratic = false;

  Eigen::Index num_players() const { return static_cast<Eigen::Index>(players.size()); }
  std::vector<Eigen::Index> dims() const;
  Eigen::Index dim() const;

  /// Throws ConfigError when the fields are inconsistent.
  void validate() const;
};

/// Throws ConformanceError unless x has the game's block structure.
void check_conforms(const GameSpec& game, const BlockVector& x);

std::vector<double> evaluate_total_objective(const GameSpec& game, const BlockVector& x);

/// Blockwise projection onto X.
BlockVector project_onto(const GameSpec& game, const BlockVector& x);

bool is_feasible(const GameSpec& game, const BlockVector& x, double tol);

/// Pi_X[0], the default starting point.
BlockVector origin_projection(const GameSpec& game);

/// F(x): own-block gradients of every player stacked into one vector.
Eigen::VectorXd pseudo_gradient(const GameSpec& game, const BlockVector& x);

/// Own-block part of player nu's full gradient.
inline Eigen::VectorXd own_part(const BlockVector& x, Eigen::Index nu,
                                const Eigen::VectorXd& full) {
  return full.segment(x.offset(nu), x.block_dim(nu));
}

}  // namespace nashgap

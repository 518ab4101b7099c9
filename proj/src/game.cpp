#include "nashgap/game.hpp"

namespace nashgap {

std::vector<Eigen::Index> GameSpec::dims() const {
  std::vector<Eigen::Index> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(s.dim());
  return out;
}

Eigen::Index GameSpec::dim() const {
  Eigen::Index n = 0;
  for (const auto& s : sets) n += s.dim();
  return n;
}

void GameSpec::validate() const {
  if (players.empty()) throw ConfigError(name + ": a game needs at least one player");
  if (sets.size() != players.size() || smoothness.size() != players.size()) {
    throw ConfigError(name + ": players, sets and smoothness must have equal length");
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError(name + ": noise_sigma must be >= 0");
  for (std::size_t nu = 0; nu < players.size(); ++nu) {
    const auto& p = players[nu];
    if (!p.value || !p.grad || !p.sampled_grad || !p.sampled_value) {
      throw ConfigError(name + ": player " + std::to_string(nu) + " is missing a callback");
    }
    if (p.own_block != static_cast<Eigen::Index>(nu)) {
      throw ConfigError(name + ": player " + std::to_string(nu) + " owns the wrong block");
    }
    const auto& s = smoothness[nu];
    if (!(s.L0 >= 0.0 && s.L1 >= 0.0 && s.LG >= 0.0)) {
      throw ConfigError(name + ": smoothness constants must be nonnegative");
    }
  }
}

void check_conforms(const GameSpec& game, const BlockVector& x) {
  if (!x.conforms(game.dims())) {
    throw ConformanceError("point does not conform to the block structure of game '" +
                           game.name + "'");
  }
}

std::vector<double> evaluate_total_objective(const GameSpec& game, const BlockVector& x) {
  check_conforms(game, x);
  std::vector<double> out;
  out.reserve(game.players.size());
  for (const auto& p : game.players) out.push_back(p.value(x));
  return out;
}

BlockVector project_onto(const GameSpec& game, const BlockVector& x) {
  check_conforms(game, x);
  BlockVector out = x;
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    out.block(nu) = project(game.sets[nu], x.block(nu));
  }
  return out;
}

bool is_feasible(const GameSpec& game, const BlockVector& x, double tol) {
  check_conforms(game, x);
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    if (!contains(game.sets[nu], x.block(nu), tol)) return false;
  }
  return true;
}

BlockVector origin_projection(const GameSpec& game) {
  return project_onto(game, BlockVector(game.dims()));
}

Eigen::VectorXd pseudo_gradient(const GameSpec& game, const BlockVector& x) {
  check_conforms(game, x);
  Eigen::VectorXd out(x.size());
  for (Eigen::Index nu = 0; nu < game.num_players(); ++nu) {
    out.segment(x.offset(nu), x.block_dim(nu)) = own_part(x, nu, game.players[nu].grad(x));
  }
  return out;
}

}  // namespace nashgap

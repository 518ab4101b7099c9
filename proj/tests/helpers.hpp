#pragma once

#include <initializer_list>

#include "nashgap/bench_games.hpp"

namespace test {

using nashgap::BlockVector;

/// One scalar block per entry.
inline BlockVector scalars(std::initializer_list<double> v) {
  std::vector<Eigen::VectorXd> blocks;
  for (double x : v) blocks.push_back(Eigen::VectorXd::Constant(1, x));
  return BlockVector::from_blocks(blocks);
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

/// theta(x) = x^2 on [-1, 1].
inline nashgap::GameSpec scalar_game(double sigma = 0.0) { return nashgap::make_scalar(sigma).game; }

}  // namespace test

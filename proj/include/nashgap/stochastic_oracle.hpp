#pragma once

#include <cstdint>

#include "nashgap/game.hpp"

namespace nashgap {

/// Mean of M sampled full gradients of `player` at x. Sample j draws its noise
/// from stream.child(j), so two calls with the same stream share samples.
/// The reduction runs in sample-index order.
Eigen::VectorXd batch_gradient(const PlayerObjective& player, const BlockVector& x,
                               std::int64_t M, const RngStream& stream);

}  // namespace nashgap

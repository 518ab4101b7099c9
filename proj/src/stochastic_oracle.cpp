#include "nashgap/stochastic_oracle.hpp"

namespace nashgap {

Eigen::VectorXd batch_gradient(const PlayerObjective& player, const BlockVector& x,
                               std::int64_t M, const RngStream& stream) {
  if (M < 1) throw ConfigError("batch_gradient: M must be >= 1");
  // Running mean in sample order: identical samples reproduce themselves exactly.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(x.size());
  for (std::int64_t j = 0; j < M; ++j) {
    const NoiseDraw xi = draw_noise(stream.child(static_cast<std::uint64_t>(j)), player.noise_dim);
    mean += (player.sampled_grad(x, xi) - mean) / static_cast<double>(j + 1);
  }
  return mean;
}

}  // namespace nashgap

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>

#include "nashgap/stochastic_oracle.hpp"
#include "nashgap/verification.hpp"

using namespace nashgap;
using test::scalars;

namespace {

// One player whose sampled gradient is grad + sigma * xi with xi ~ N(0, I_n)
// over the whole joint vector, so the batch-mean error has E||e||^2 = n sigma^2 / M.
PlayerObjective full_noise_player(double sigma, Eigen::Index n) {
  PlayerObjective p;
  p.own_block = 0;
  p.noise_dim = n;
  p.value = [](const BlockVector& x) { return 0.5 * x.flat().squaredNorm(); };
  p.sampled_value = [](const BlockVector& x, const NoiseDraw&) { return 0.5 * x.flat().squaredNorm(); };
  p.grad = [](const BlockVector& x) -> Eigen::VectorXd { return x.flat(); };
  p.sampled_grad = [sigma](const BlockVector& x, const NoiseDraw& xi) -> Eigen::VectorXd {
    return x.flat() + sigma * xi.values;
  };
  return p;
}

}  // namespace

TEST_CASE("noise-free batches equal the deterministic gradient exactly") {
  const auto e = make_game("quadratic2", {{"sigma", 0.0}});
  const BlockVector x = scalars({0.3, -1.7});
  for (std::int64_t M : {1, 3, 7, 100}) {
    for (const auto& p : e.game.players) {
      CHECK(batch_gradient(p, x, M, RngStream(1)) == p.grad(x));
    }
  }
}

TEST_CASE("M = 1 is a single sampled draw") {
  const auto e = make_game("quadratic2");
  const BlockVector x = scalars({0.3, -1.7});
  const auto& p = e.game.players[1];
  const RngStream s(9);
  CHECK(batch_gradient(p, x, 1, s) == p.sampled_grad(x, draw_noise(s.child(0), p.noise_dim)));
  CHECK_THROWS_AS(batch_gradient(p, x, 0, s), ConfigError);
}

TEST_CASE("batch error second moment is n sigma^2 / M") {
  const double sigma = 1.3;
  const Eigen::Index n = 3;
  const PlayerObjective p = full_noise_player(sigma, n);
  const BlockVector x = BlockVector::split(test::vec({0.1, 0.2, 0.3}), {3});
  const std::int64_t M = 100;
  double total = 0.0;
  constexpr int kRepeats = 1000;
  for (int r = 0; r < kRepeats; ++r)
    total += (batch_gradient(p, x, M, RngStream(5).child(r)) - p.grad(x)).squaredNorm();
  const double expected = n * sigma * sigma / M;
  CHECK(total / kRepeats == doctest::Approx(expected).epsilon(0.2));
}

TEST_CASE("batch error is unbiased and shrinks like 1/M") {
  const auto e = make_game("quadratic2");
  const auto& p = e.game.players[0];
  const BlockVector x = scalars({1.0, 0.5});
  std::vector<std::pair<double, double>> pts;
  for (std::int64_t M : {1, 4, 16, 64}) {
    double sq = 0.0;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd sum2 = Eigen::VectorXd::Zero(2);
    constexpr int kRepeats = 4000;
    for (int r = 0; r < kRepeats; ++r) {
      const Eigen::VectorXd err = batch_gradient(p, x, M, RngStream(8).child(M).child(r)) - p.grad(x);
      sq += err.squaredNorm();
      sum += err;
      sum2 += err.cwiseProduct(err);
    }
    pts.push_back({static_cast<double>(M), sq / kRepeats});
    for (Eigen::Index i = 0; i < 2; ++i) {
      const double mean = sum[i] / kRepeats;
      const double se = std::sqrt(std::max(sum2[i] / kRepeats - mean * mean, 0.0) / kRepeats);
      CHECK(std::abs(mean) <= 5.0 * se + 1e-15);
    }
  }
  CHECK(fit_loglog_slope(pts).slope == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("sub-streams make sample order irrelevant") {
  const auto e = make_game("quadratic2");
  const auto& p = e.game.players[0];
  const BlockVector x = scalars({1.0, 0.5});
  const RngStream s(31);
  // Draw j only depends on s.child(j), so a reversed summation gives the same mean.
  Eigen::VectorXd rev = Eigen::VectorXd::Zero(2);
  for (int j = 9; j >= 0; --j) rev += p.sampled_grad(x, draw_noise(s.child(j), 1));
  CHECK((batch_gradient(p, x, 10, s) - rev / 10.0).norm() <= 1e-14);
}

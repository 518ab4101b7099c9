#include "doctest.h"
#include "helpers.hpp"

#include <algorithm>
#include <cmath>

#include "nashgap/constants.hpp"
#include "nashgap/inner_sa.hpp"
#include "nashgap/verification.hpp"

using namespace nashgap;
using test::scalars;

namespace {

InnerConfig fixed_steps(double alpha, std::int64_t T) {
  InnerConfig c;
  c.alpha = alpha;
  c.steps_override = T;
  return c;
}

// Prox best response of quadratic2 player nu in closed form:
// argmin 1/2 y^2 + c y x_other + b y + alpha/2 (x_nu - y)^2 on [lo, hi].
double quadratic_prox(double x_nu, double x_other, double c, double b, double alpha, double lo,
                      double hi) {
  return std::clamp((alpha * x_nu - c * x_other - b) / (1.0 + alpha), lo, hi);
}

}  // namespace

TEST_CASE("SA step count formula") {
  CHECK(sa_iteration_count(0.1, 1, 1, 1) == 40);
  CHECK(sa_iteration_count(1, 1, 1, 1) == 4);
  CHECK(sa_iteration_count(0.5, 2, 2, 0.5) == 6);
  CHECK(sa_iteration_count(0.3, 1, 1, 1) == 14);  // 13.33 rounds up
  CHECK_THROWS_AS(sa_iteration_count(0.0, 1, 1, 1), ConfigError);
  CHECK_THROWS_AS(sa_iteration_count(-1.0, 1, 1, 1), ConfigError);
}

TEST_CASE("inner step rule for a player uses its set diameter") {
  const auto e = make_game("quadratic2");
  InnerConfig c;
  c.alpha = 2.0;
  c.epsilon_target = 0.5;
  c.l1_v_alpha = 4.0;
  // (2 * 16 / 4 + 2 * 16) / 0.5
  CHECK(inner_steps(e.game, 0, c) == 80);
  c.steps_override = 7;
  CHECK(inner_steps(e.game, 1, c) == 7);
}

TEST_CASE("noise-free scalar SA reaches the prox point") {
  const GameSpec g = test::scalar_game();
  const Eigen::VectorXd z = solve_best_response_sa(g, scalars({1.0}), 0, fixed_steps(2.0, 10000), RngStream(1));
  // closed-form minimizer alpha x / (2 + alpha)
  CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("SA started at the fixed point stays there") {
  const GameSpec g = test::scalar_game();
  for (std::int64_t T : {1, 5, 50}) {
    CHECK(solve_best_response_sa(g, scalars({0.0}), 0, fixed_steps(2.0, T), RngStream(1))[0] == 0.0);
  }
  const auto e = make_game("quadratic2", {{"sigma", 0.0}});
  const Eigen::VectorXd z =
      solve_best_response_sa(e.game, *e.known_ne, 1, fixed_steps(2.0, 30), RngStream(1));
  CHECK(std::abs(z[0] - e.known_ne->block(1)[0]) <= 1e-14);
}

TEST_CASE("SA output is feasible after every step count") {
  const auto e = make_game("quadratic2", {{"sigma", 3.0}});
  const BlockVector x = scalars({2.0, -2.0});
  for (std::int64_t T = 0; T <= 40; ++T) {
    for (Eigen::Index nu = 0; nu < 2; ++nu) {
      const Eigen::VectorXd z = solve_best_response_sa(e.game, x, nu, fixed_steps(2.5, T), RngStream(T));
      CHECK(contains(e.game.sets[static_cast<std::size_t>(nu)], z, 0.0));
    }
  }
}

TEST_CASE("epsilon contract with the printed step count") {
  const auto e = make_game("quadratic2");
  const double alpha = 2.0 * e.game.smoothness[0].LG;
  const BlockVector x = scalars({1.5, -0.5});
  const BlockVector y = solve_all_best_responses_exact(e.game, x, alpha, 1e-12);
  InnerConfig c;
  c.alpha = alpha;
  c.epsilon_target = 0.01;
  c.l1_v_alpha = smoothness_v_alpha(e.game, alpha);
  double mean = 0.0;
  for (int r = 0; r < 200; ++r)
    mean += (solve_all_best_responses(e.game, x, c, RngStream(3).child(r)).flat() - y.flat())
                .squaredNorm() / 200.0;
  CHECK(mean <= 0.01);
}

TEST_CASE("exact solver: scalar closed form and validation") {
  const GameSpec g = test::scalar_game();
  CHECK(solve_best_response_exact(g, scalars({1.0}), 0, 2.0, 1e-12)[0] ==
        doctest::Approx(0.5).epsilon(1e-11));
  CHECK_THROWS_AS(solve_best_response_exact(g, scalars({1.0}), 0, 2.0, 0.0), ConfigError);
}

TEST_CASE("exact solver matches the analytic prox on quadratic2") {
  const auto e = make_game("quadratic2");
  const double alpha = 2.5;
  const RngStream s(12);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const BlockVector x = random_feasible_point(e.game, s, i);
    const BlockVector y = solve_all_best_responses_exact(e.game, x, alpha, 1e-12);
    for (Eigen::Index nu = 0; nu < 2; ++nu) {
      const double want = quadratic_prox(x.block(nu)[0], x.block(1 - nu)[0], 0.5, -1.0, alpha, -2, 2);
      CHECK(std::abs(y.block(nu)[0] - want) <= 1e-10);
    }
  }
}

TEST_CASE("exact solver returns at once from the interior prox point") {
  const auto e = make_game("quadratic2", {{"sigma", 0.0}});
  const double alpha = 2.0;
  const BlockVector x = scalars({0.2, 0.1});
  const double y0 = quadratic_prox(0.2, 0.1, 0.5, -1, alpha, -2, 2);
  // anchor the player at a point whose prox is itself: x_nu = -(c x_other + b)
  const BlockVector fixed = scalars({-(0.5 * 0.1 - 1.0), 0.1});
  CHECK(solve_best_response_exact(e.game, fixed, 0, alpha, 1e-14)[0] == fixed.block(0)[0]);
  CHECK(std::abs(solve_best_response_exact(e.game, x, 0, alpha)[0] - y0) <= 1e-9);
}

TEST_CASE("all-player SA: single block, T limit, per-player streams") {
  const GameSpec g = test::scalar_game(0.5);
  const InnerConfig c = fixed_steps(2.0, 25);
  const RngStream s(4);
  CHECK(solve_all_best_responses(g, scalars({0.7}), c, s).block(0) ==
        solve_best_response_sa(g, scalars({0.7}), 0, c, inner_stream(s, 0)));

  const auto e = make_game("quadratic2", {{"sigma", 0.0}});
  const BlockVector x = scalars({-1.0, 1.5});
  const BlockVector sa = solve_all_best_responses(e.game, x, fixed_steps(2.5, 10000), s);
  const BlockVector ex = solve_all_best_responses_exact(e.game, x, 2.5);
  CHECK((sa.flat() - ex.flat()).norm() <= 1e-3);

  const auto n = make_game("quadratic2");
  const BlockVector all = solve_all_best_responses(n.game, x, fixed_steps(2.5, 50), s);
  const Eigen::VectorXd second = solve_best_response_sa(n.game, x, 1, fixed_steps(2.5, 50), inner_stream(s, 1));
  const Eigen::VectorXd first = solve_best_response_sa(n.game, x, 0, fixed_steps(2.5, 50), inner_stream(s, 0));
  CHECK(all.block(0) == first);
  CHECK(all.block(1) == second);
}

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>

#include "nashgap/constants.hpp"

using namespace nashgap;

namespace {

GameSpec one_player(double L0, double L1, double LG, double C) {
  GameSpec g = test::scalar_game();
  g.smoothness[0] = {L0, L1, LG};
  g.sets[0] = FeasibleSet::interval(0.0, C);
  return g;
}

}  // namespace

TEST_CASE("best-response Lipschitz constant") {
  CHECK(lipschitz_y_alpha(3.0, 1.0) == 2.0);
  CHECK(lipschitz_y_alpha(2.0, 1.0) == 3.0);
  CHECK(lipschitz_y_alpha(0.7, 0.0) == 1.0);
  CHECK_THROWS_AS(lipschitz_y_alpha(1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(lipschitz_y_alpha(0.5, 1.0), ConfigError);
  try {
    lipschitz_y_alpha(1.0, 2.0);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("alpha > L_G") != std::string::npos);
  }
}

TEST_CASE("V_alpha Lipschitz constant") {
  CHECK(lipschitz_v_alpha(one_player(1, 1, 0, 1), 1.0) ==
        doctest::Approx(1.0 + std::sqrt(2.0) + 8.0).epsilon(1e-14));
  // doubling L0 doubles the first summand only
  const double a = lipschitz_v_alpha(one_player(1, 1, 0, 1), 1.0);
  const double b = lipschitz_v_alpha(one_player(2, 1, 0, 1), 1.0);
  CHECK(b - a == doctest::Approx(1.0 + std::sqrt(2.0)));
}

TEST_CASE("V_alpha smoothness constant") {
  CHECK(smoothness_v_alpha(one_player(1, 1, 0, 1), 1.0) ==
        doctest::Approx(2.0 * (1.0 + std::sqrt(2.0)) + 2.0).epsilon(1e-14));
  // large alpha: L0y -> 1, expression -> 2 sum (L1 + L1 sqrt 2) + 2 alpha, increasing
  const GameSpec g = one_player(1, 1, 0.5, 1);
  double prev = smoothness_v_alpha(g, 10.0);
  for (double a = 20.0; a < 200.0; a += 10.0) {
    const double cur = smoothness_v_alpha(g, a);
    CHECK(cur > prev);
    prev = cur;
  }
  const double limit = 2.0 * (1.0 + std::sqrt(2.0)) + 2.0 * 1e6;
  CHECK(smoothness_v_alpha(g, 1e6) == doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("error-bound constants") {
  const auto q = make_game("quadratic2");
  CHECK(error_bound_constants(q.game, 2.5).rho == 16.0);
  const auto q0 = make_game("quadratic2", {{"sigma", 0.0}});
  CHECK(error_bound_constants(q0.game, 2.5).rho == 0.0);
  CHECK(error_bound_constants(one_player(1, 1, 0, 1), 1.0).mu == 8.0);
}

TEST_CASE("compute_constants assembles everything") {
  const auto q = make_game("quadratic2");
  const double alpha = 2.5;
  const ConstantSet c = compute_constants(q.game, alpha);
  CHECK(c.L0_y_alpha >= 1.0);
  CHECK(c.L0_V_alpha > 0.0);
  CHECK(c.L1_V_alpha > 0.0);
  CHECK(c.mu == doctest::Approx(6.0 * 2.0 * std::pow(q.game.smoothness[0].L1, 2) + 4.0 * alpha));
  CHECK(c.mu_alpha_squared == doctest::Approx(c.mu - 4.0 * alpha + 4.0 * alpha * alpha));
  REQUIRE(c.per_player.size() == 2);
  CHECK(c.per_player[0].D == 16.0);
  CHECK(c.per_player[0].C == 4.0);
  // default step is admissible by construction
  CHECK(1.0 / (2.0 * c.L1_V_alpha) < 1.0 / c.L1_V_alpha);
}

TEST_CASE("constants are nondecreasing in their inputs") {
  const double alpha = 5.0;
  const GameSpec base = one_player(1.0, 1.0, 1.0, 1.0);
  const ConstantSet c0 = compute_constants(base, alpha);
  for (int which = 0; which < 4; ++which) {
    GameSpec g = one_player(1.0 + (which == 0) * 0.1, 1.0 + (which == 1) * 0.1,
                            1.0 + (which == 2) * 0.1, 1.0 + (which == 3) * 0.1);
    const ConstantSet c = compute_constants(g, alpha);
    CHECK(c.L0_y_alpha >= c0.L0_y_alpha);
    CHECK(c.L0_V_alpha >= c0.L0_V_alpha);
    CHECK(c.L1_V_alpha >= c0.L1_V_alpha);
    CHECK(c.mu >= c0.mu);
  }
}

#include "doctest.h"
#include "helpers.hpp"

#include <algorithm>
#include <cmath>

#include "nashgap/ni_gap.hpp"
#include "nashgap/verification.hpp"

using namespace nashgap;
using test::scalars;

TEST_CASE("Cournot equilibria in closed form") {
  // linear costs only: x = (A - c) / (3 B)
  CournotParams p;
  p.quadratic_cost = {0.0, 0.0};
  p.linear_cost = {1.0, 1.0};
  const auto e = make_cournot(p);
  for (Eigen::Index nu = 0; nu < 2; ++nu) CHECK(e.known_ne->block(nu)[0] == doctest::Approx(3.0));

  // default catalog costs x + x^2/4: 9 = 3.5 x
  const auto d = make_game("cournot2");
  CHECK(d.known_ne->block(0)[0] == doctest::Approx(9.0 / 3.5).epsilon(1e-10));

  // marginal cost above the intercept: nobody produces
  p.linear_cost = {12.0, 12.0};
  const auto z = make_cournot(p);
  CHECK(z.known_ne->flat().norm() <= 1e-12);

  // monopoly: (A - c) / (2 B + c2)
  CournotParams m;
  m.N = 1;
  m.linear_cost = {2.0};
  m.quadratic_cost = {1.0};
  CHECK(make_cournot(m).known_ne->block(0)[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-10));

  CournotParams bad;
  bad.slope = 0.0;
  CHECK_THROWS_AS(make_cournot(bad), ConfigError);
}

TEST_CASE("quadratic family parameters are checked") {
  CHECK_THROWS_AS(make_quadratic(2, 1.0, 1.0, -2, 2, {}), ConfigError);
  CHECK_THROWS_AS(make_quadratic(2, -1.2, 1.0, -2, 2, {}), ConfigError);
  CHECK_THROWS_AS(make_quadratic(2, 0.5, 1.0, -2, 2, {}, 4), ConfigError);
  CHECK_THROWS_AS(make_game("quadratic2", {{"bogus", 1.0}}), ConfigError);
  CHECK_THROWS_AS(make_game("nope"), ConfigError);
  const auto e = make_game("quadratic2", {{"N", 3}, {"block_dim", 2}});
  CHECK(e.game.num_players() == 3);
  CHECK(e.game.dim() == 6);
}

TEST_CASE("declared constants dominate sampled difference quotients") {
  for (const auto& name : game_names()) {
    const auto e = make_game(name);
    const RngStream s(17);
    for (std::size_t nu = 0; nu < e.game.players.size(); ++nu) {
      const auto& p = e.game.players[nu];
      const auto& c = e.game.smoothness[nu];
      CHECK(c.LG == c.L1);
      for (std::uint64_t i = 0; i < 300; ++i) {
        const BlockVector a = random_feasible_point(e.game, s, 2 * i);
        const BlockVector b = random_feasible_point(e.game, s, 2 * i + 1);
        const double dx = (a.flat() - b.flat()).norm();
        CHECK(std::abs(p.value(a) - p.value(b)) <= c.L0 * dx + 1e-12);
        CHECK((p.grad(a) - p.grad(b)).norm() <= c.L1 * dx + 1e-12);
      }
    }
  }
}

TEST_CASE("catalog equilibria have zero gap and zero VI residual") {
  for (const auto& name : game_names()) {
    const auto e = make_game(name);
    REQUIRE(e.known_ne.has_value());
    double max_lg = 0.0;
    for (const auto& s : e.game.smoothness) max_lg = std::max(max_lg, s.LG);
    CHECK(v_alpha_exact(e.game, *e.known_ne, 2.0 * max_lg).value <= 1e-6);
    CHECK(vi_residual(e.game, *e.known_ne) <= 1e-8);
    CHECK_FALSE(game_description(name).empty());
  }
}

TEST_CASE("nonmonotone game: indefinite Jacobian and independent regularity recount") {
  const auto e = make_game("nonmonotone2");
  CHECK(e.nonmonotone_regular);
  CHECK_FALSE(e.strongly_monotone);
  Eigen::Matrix2d S;
  S << 1.0, (2.5 + 0.1) / 2, (2.5 + 0.1) / 2, 1.0;
  const auto ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(S).eigenvalues();
  CHECK(ev.minCoeff() < 0.0);
  CHECK_THROWS_AS(make_nonmonotone_regular(1.5, -0.2), ConfigError);

  // Recount on the 41 x 41 grid from the hand-derived prox responses.
  const double c12 = 2.5, c21 = 0.1, b1 = -1.0, b2 = -0.5;
  Eigen::Matrix2d Q1, Q2;
  Q1 << 1.0, c12, c12, 0.0;
  Q2 << 0.0, c21, c21, 1.0;
  const double lg = std::max(Q1.operatorNorm(), Q2.operatorNorm());
  const double alpha = 2.0 * lg;
  CHECK(e.regularity_alpha == doctest::Approx(alpha).epsilon(1e-12));
  int bad = 0;
  for (int i = 0; i < 41; ++i) {
    for (int j = 0; j < 41; ++j) {
      const double x1 = -1.0 + i * 0.05, x2 = -1.0 + j * 0.05;
      const double y1 = std::clamp((alpha * x1 - c12 * x2 - b1) / (1 + alpha), -1.0, 1.0);
      const double y2 = std::clamp((alpha * x2 - c21 * x1 - b2) / (1 + alpha), -1.0, 1.0);
      const double d1 = x1 - y1, d2 = x2 - y2;
      if (std::hypot(d1, d2) <= 1e-8) continue;
      if (d1 * d1 + (c12 + c21) * d1 * d2 + d2 * d2 <= 0.0) ++bad;
    }
  }
  CHECK(e.regularity_points == 1681);
  CHECK(e.regularity_violations == bad);
  CHECK(e.warnings.empty() == (bad == 0));
}

TEST_CASE("scalar game") {
  const auto e = make_scalar(0.3);
  CHECK(e.game.noise_sigma == 0.3);
  CHECK(e.game.smoothness[0].L1 == doctest::Approx(2.0));
  CHECK(e.game.smoothness[0].L0 == doctest::Approx(2.0));
  CHECK(e.game.players[0].value(scalars({0.5})) == doctest::Approx(0.25));
}

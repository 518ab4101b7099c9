#include "doctest.h"
#include "helpers.hpp"

#include <random>

using namespace nashgap;
using test::vec;

namespace {

// Brute-force Euclidean projection onto {w >= 0, sum w = s}: enumerate the
// support, solve the equality-constrained problem on it, keep the best
// feasible candidate.
Eigen::VectorXd simplex_oracle(const Eigen::VectorXd& v, double s) {
  const Eigen::Index d = v.size();
  Eigen::VectorXd best;
  double best_dist = INFINITY;
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    double sum = 0.0;
    int k = 0;
    for (Eigen::Index i = 0; i < d; ++i)
      if (mask >> i & 1) {
        sum += v[i];
        ++k;
      }
    const double shift = (sum - s) / k;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    bool ok = true;
    for (Eigen::Index i = 0; i < d; ++i)
      if (mask >> i & 1) {
        w[i] = v[i] - shift;
        ok = ok && w[i] >= -1e-15;
      }
    if (!ok) continue;
    const double dist = (w - v).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = w;
    }
  }
  return best;
}

std::vector<FeasibleSet> sample_sets() {
  return {FeasibleSet::box(vec({-1, 0, 2}), vec({1, 0.5, 3})), FeasibleSet::ball(vec({1, -1, 0}), 2.0),
          FeasibleSet::simplex(3, 1.5)};
}

}  // namespace

TEST_CASE("projection examples") {
  CHECK(project(FeasibleSet::interval(0, 1), vec({1.5}))[0] == 1.0);
  const Eigen::VectorXd s = project(FeasibleSet::simplex(2, 1.0), vec({1, 1}));
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-15));
  const Eigen::VectorXd b = project(FeasibleSet::ball(vec({0, 0}), 1.0), vec({3, 4}));
  CHECK(b[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(b[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(project(FeasibleSet::ball(vec({2, 2}), 1.0), vec({2, 2})) == vec({2, 2}));
  CHECK_THROWS_AS(project(FeasibleSet::interval(0, 1), vec({1, 2})), ConformanceError);
}

TEST_CASE("squared diameters") {
  CHECK(squared_diameter(FeasibleSet::box(vec({0, 0}), vec({1, 1}))) == 2.0);
  CHECK(squared_diameter(FeasibleSet::ball(vec({0}), 1.0)) == 4.0);
  CHECK(squared_diameter(FeasibleSet::simplex(2, 1.0)) == 2.0);
  CHECK(diameter(FeasibleSet::ball(vec({0}), 1.0)) == 2.0);
  // vertex-pair oracle for the simplex
  const double s = 1.5;
  double best = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) best = std::max(best, i == j ? 0.0 : 2.0 * s * s);
  CHECK(squared_diameter(FeasibleSet::simplex(3, s)) == doctest::Approx(best));
}

TEST_CASE("contains examples") {
  CHECK(contains(FeasibleSet::interval(0, 1), vec({0.5}), 0.0));
  CHECK_FALSE(contains(FeasibleSet::interval(0, 1), vec({1.1}), 0.05));
  CHECK(contains(FeasibleSet::simplex(2, 1.0), vec({0.5, 0.5}), 0.0));
}

TEST_CASE("invalid sets are rejected") {
  CHECK_THROWS_AS(FeasibleSet::box(vec({1}), vec({0})), ConfigError);
  CHECK_THROWS_AS(FeasibleSet::ball(vec({0}), 0.0), ConfigError);
  CHECK_THROWS_AS(FeasibleSet::simplex(2, -1.0), ConfigError);
}

TEST_CASE("idempotence, nonexpansiveness and the variational inequality") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n(0.0, 3.0);
  auto draw = [&] { return vec({n(gen), n(gen), n(gen)}); };
  for (const auto& set : sample_sets()) {
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::VectorXd u = draw(), v = draw();
      const Eigen::VectorXd pu = project(set, u), pv = project(set, v);
      CHECK(contains(set, pu, 1e-12));
      CHECK((project(set, pu) - pu).norm() <= 1e-14);
      CHECK((pu - pv).norm() <= (u - v).norm() + 1e-12);
      const Eigen::VectorXd w = project(set, draw());
      CHECK((v - pv).dot(w - pv) <= 1e-10);
    }
  }
}

TEST_CASE("simplex projection matches the active-set oracle") {
  std::mt19937_64 gen(19);
  std::normal_distribution<double> n(0.0, 2.0);
  for (Eigen::Index d = 1; d <= 4; ++d) {
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd v(d);
      for (Eigen::Index i = 0; i < d; ++i) v[i] = n(gen);
      const double s = 0.5 + trial % 3;
      CHECK((project(FeasibleSet::simplex(d, s), v) - simplex_oracle(v, s)).norm() <= 1e-10);
    }
  }
}

TEST_CASE("ties in the simplex sort are deterministic") {
  const Eigen::VectorXd v = vec({0.3, 0.3, 0.3, -1});
  const Eigen::VectorXd p = project(FeasibleSet::simplex(4, 1.0), v);
  CHECK(p == project(FeasibleSet::simplex(4, 1.0), v));
  CHECK(p[3] == 0.0);
  CHECK(p.sum() == doctest::Approx(1.0));
}

TEST_CASE("templated on scalar") {
  using S = FeasibleSetT<float>;
  Eigen::VectorXf v(2);
  v << 3.0f, 4.0f;
  Eigen::VectorXf c = Eigen::VectorXf::Zero(2);
  const Eigen::VectorXf p = project(S::ball(c, 1.0f), v);
  CHECK(p[0] == doctest::Approx(0.6f));
}

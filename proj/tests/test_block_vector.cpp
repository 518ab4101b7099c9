#include "doctest.h"
#include "helpers.hpp"

#include <random>

using namespace nashgap;
using test::vec;

TEST_CASE("split and flatten are inverse") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::Index> dims{1 + trial % 3, 2, 1 + trial % 2};
    Eigen::VectorXd v(dims[0] + dims[1] + dims[2]);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = n(gen);
    const BlockVector b = BlockVector::split(v, dims);
    CHECK(b.flatten() == v);
    CHECK(b.num_blocks() == 3);
    CHECK(b.block_dim(0) == dims[0]);
    CHECK(BlockVector::split(b.flatten(), dims) == b);
  }
}

TEST_CASE("split rejects a non-conforming vector") {
  CHECK_THROWS_AS(BlockVector::split(vec({1, 2, 3}), {1, 1}), ConformanceError);
  CHECK_THROWS_AS(BlockVector(std::vector<Eigen::Index>{1, 0}), ConformanceError);
}

TEST_CASE("blocks view the contiguous storage") {
  BlockVector b = BlockVector::split(vec({1, 2, 3, 4}), {1, 2, 1});
  CHECK(b.offset(1) == 1);
  CHECK(b.block(1)[1] == 3.0);
  b.block(1)[0] = 9.0;
  CHECK(b.flat()[1] == 9.0);
  CHECK_THROWS(b.block(3));
  CHECK(b.conforms({1, 2, 1}));
  CHECK_FALSE(b.conforms({2, 2}));
}

TEST_CASE("swap_block examples") {
  const BlockVector x = test::scalars({1, 2});
  CHECK(swap_block(x, 0, vec({5})) == test::scalars({5, 2}));
  CHECK(swap_block(x, 1, x.block(1)) == x);
  CHECK(x == test::scalars({1, 2}));

  const BlockVector z = BlockVector::split(vec({1, 1, 2}), {2, 1});
  CHECK(swap_block(z, 1, vec({9})).flat() == vec({1, 1, 9}));
  CHECK_THROWS_AS(swap_block(z, 1, vec({9, 9})), ConformanceError);
  CHECK_THROWS(swap_block(z, 2, vec({9})));
}

TEST_CASE("swap back restores the point") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const BlockVector x = BlockVector::split(vec({u(gen), u(gen), u(gen)}), {2, 1});
    const Eigen::Index nu = trial % 2;
    Eigen::VectorXd y(x.block_dim(nu));
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = u(gen);
    CHECK(swap_block(swap_block(x, nu, y), nu, x.block(nu)) == x);
  }
}

TEST_CASE("from_blocks and assign") {
  BlockVector b = BlockVector::from_blocks({vec({1, 2}), vec({3})});
  CHECK(b.dims() == std::vector<Eigen::Index>{2, 1});
  b.assign(vec({4, 5, 6}));
  CHECK(b.block(1)[0] == 6.0);
  CHECK_THROWS_AS(b.assign(vec({1})), ConformanceError);
}

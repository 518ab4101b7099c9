#include "doctest.h"

#include <cmath>

#include "nashgap/rng.hpp"

using namespace nashgap;

TEST_CASE("same seed and path give the same draws") {
  const RngStream a = RngStream(42).child(3).child(stream_tag::kInnerSa);
  const RngStream b = RngStream(42).child(3).child(stream_tag::kInnerSa);
  CHECK(draw_noise(a, 5).values == draw_noise(b, 5).values);
  CHECK(a.bits(17) == b.bits(17));
}

TEST_CASE("different paths and seeds differ") {
  const RngStream root(42);
  CHECK(root.child(1).bits(0) != root.child(2).bits(0));
  CHECK(root.child(1).child(2).bits(0) != root.child(2).child(1).bits(0));
  CHECK(RngStream(1).bits(0) != RngStream(2).bits(0));
  CHECK(root.child(stream_tag::kInnerSa).key() != root.child(stream_tag::kOuterBatch).key());
  CHECK(root.child(5).depth() == 1);
}

TEST_CASE("uniforms lie in [0, 1)") {
  const RngStream s(9);
  double lo = 1.0, hi = 0.0;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    const double u = s.uniform(i);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(lo < 1e-3);
  CHECK(hi > 1.0 - 1e-3);
}

TEST_CASE("normal draws: mean and variance over 1e5 draws") {
  const RngStream root(2024);
  constexpr int kDraws = 100000;
  constexpr int kDim = 3;
  double sum[kDim] = {}, sq[kDim] = {};
  for (int j = 0; j < kDraws; ++j) {
    const auto d = draw_noise(root.child(static_cast<std::uint64_t>(j)), kDim);
    for (int i = 0; i < kDim; ++i) {
      sum[i] += d.values[i];
      sq[i] += d.values[i] * d.values[i];
    }
  }
  for (int i = 0; i < kDim; ++i) {
    const double mean = sum[i] / kDraws;
    const double var = sq[i] / kDraws - mean * mean;
    CHECK(std::abs(mean) <= 0.02);
    CHECK(var >= 0.97);
    CHECK(var <= 1.03);
  }
}

TEST_CASE("components of one draw are uncorrelated") {
  const RngStream root(5);
  double cross = 0.0;
  constexpr int kDraws = 50000;
  for (int j = 0; j < kDraws; ++j) {
    const auto d = draw_noise(root.child(static_cast<std::uint64_t>(j)), 2);
    cross += d.values[0] * d.values[1];
  }
  CHECK(std::abs(cross / kDraws) <= 5.0 / std::sqrt(kDraws));
}

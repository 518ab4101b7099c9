#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace nashgap {

/// Counter-based random stream.
///
/// A stream is a 64-bit key derived by hashing the seed and a path of integer
/// labels (replication, iteration, player, purpose tag, sample index). Draw i of
/// a stream is a pure function of (key, i), so results never depend on the order
/// or thread in which streams are consumed. There is no global RNG state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), key_(mix(seed ^ kRootSalt)) {}

  /// Sub-stream labelled by one more path component.
  RngStream child(std::uint64_t label) const {
    return RngStream(seed_, mix(key_ ^ mix(label + kChildSalt)), depth_ + 1);
  }

  /// Raw 64 random bits for counter i (SplitMix64 output function).
  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + (counter + 1) * kGolden); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t key() const { return key_; }
  int depth() const { return depth_; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  RngStream(std::uint64_t seed, std::uint64_t key, int depth)
      : seed_(seed), key_(key), depth_(depth) {}

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kRootSalt = 0x6a09e667f3bcc908ULL;
  static constexpr std::uint64_t kChildSalt = 0xbb67ae8584caa73bULL;

  std::uint64_t seed_;
  std::uint64_t key_;
  int depth_ = 0;
};

/// Purpose tags separating the draws that share a (replication, iteration, player) path.
namespace stream_tag {
inline constexpr std::uint64_t kInnerSa = 0xa11ce00000000001ULL;
inline constexpr std::uint64_t kOuterBatch = 0xa11ce00000000002ULL;
inline constexpr std::uint64_t kIterateSelection = 0xa11ce00000000003ULL;
inline constexpr std::uint64_t kVerification = 0xa11ce00000000004ULL;
}  // namespace stream_tag

/// Realization of the random vector xi entering a sampled objective.
struct NoiseDraw {
  Eigen::VectorXd values;
};

/// d independent standard normals (Box-Muller over consecutive counters).
NoiseDraw draw_noise(const RngStream& stream, Eigen::Index d);

}  // namespace nashgap

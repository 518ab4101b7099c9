#include "nashgap/rng.hpp"

#include <cmath>
#include <numbers>

namespace nashgap {

NoiseDraw draw_noise(const RngStream& stream, Eigen::Index d) {
  NoiseDraw out{Eigen::VectorXd(d)};
  for (Eigen::Index i = 0; i < d; i += 2) {
    const auto pair = static_cast<std::uint64_t>(i / 2);
    // 1 - u lies in (0, 1], keeping the logarithm finite.
    const double u1 = 1.0 - stream.uniform(2 * pair);
    const double u2 = stream.uniform(2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out.values(i) = r * std::cos(angle);
    if (i + 1 < d) out.values(i + 1) = r * std::sin(angle);
  }
  return out;
}

}  // namespace nashgap

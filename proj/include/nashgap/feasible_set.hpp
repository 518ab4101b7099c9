#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "nashgap/errors.hpp"

namespace nashgap {

template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct BoxSet {
  VectorT<Scalar> lower;
  VectorT<Scalar> upper;
};

template <typename Scalar>
struct BallSet {
  VectorT<Scalar> center;
  Scalar radius;
};

/// {w >= 0, sum(w) = scale}
template <typename Scalar>
struct SimplexSet {
  Eigen::Index dim;
  Scalar scale;
};

/// Compact convex strategy set X^nu. Construct through box/ball/simplex, which
/// validate the parameters; the object is immutable afterwards.
template <typename Scalar>
class FeasibleSetT {
 public:
  using Vector = VectorT<Scalar>;
  using Kind = std::variant<BoxSet<Scalar>, BallSet<Scalar>, SimplexSet<Scalar>>;

  static FeasibleSetT box(Vector lower, Vector upper) {
    if (lower.size() != upper.size() || lower.size() == 0) {
      throw ConfigError("box: lower/upper must be non-empty and of equal length");
    }
    if ((lower.array() > upper.array()).any()) {
      throw ConfigError("box: lower <= upper must hold componentwise");
    }
    return FeasibleSetT(BoxSet<Scalar>{std::move(lower), std::move(upper)});
  }

  static FeasibleSetT interval(Scalar lower, Scalar upper) {
    return box(Vector::Constant(1, lower), Vector::Constant(1, upper));
  }

  static FeasibleSetT ball(Vector center, Scalar radius) {
    if (center.size() == 0) throw ConfigError("ball: empty center");
    if (!(radius > Scalar(0))) throw ConfigError("ball: radius must be > 0");
    return FeasibleSetT(BallSet<Scalar>{std::move(center), radius});
  }

  static FeasibleSetT simplex(Eigen::Index dim, Scalar scale) {
    if (dim < 1) throw ConfigError("simplex: dim must be >= 1");
    if (!(scale > Scalar(0))) throw ConfigError("simplex: scale must be > 0");
    return FeasibleSetT(SimplexSet<Scalar>{dim, scale});
  }

  const Kind& kind() const { return kind_; }

  Eigen::Index dim() const {
    return std::visit(
        [](const auto& s) -> Eigen::Index {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, BoxSet<Scalar>>) return s.lower.size();
          else if constexpr (std::is_same_v<S, BallSet<Scalar>>) return s.center.size();
          else return s.dim;
        },
        kind_);
  }

  const BoxSet<Scalar>* as_box() const { return std::get_if<BoxSet<Scalar>>(&kind_); }

 private:
  explicit FeasibleSetT(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

using FeasibleSet = FeasibleSetT<double>;

namespace detail {

template <typename Scalar, typename Derived>
void check_dim(const FeasibleSetT<Scalar>& set, const Eigen::MatrixBase<Derived>& v) {
  if (v.size() != set.dim()) {
    throw ConformanceError("set of dimension " + std::to_string(set.dim()) +
                           " given a vector of length " + std::to_string(v.size()));
  }
}

// Sort-based projection; ties in the descending sort are broken by index.
template <typename Scalar, typename Derived>
VectorT<Scalar> project_simplex(const Eigen::MatrixBase<Derived>& v, Scalar scale) {
  const Eigen::Index d = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return v(a) > v(b); });
  Scalar cumulative(0);
  Scalar tau(0);
  for (Eigen::Index j = 0; j < d; ++j) {
    cumulative += v(order[j]);
    const Scalar candidate = (cumulative - scale) / Scalar(j + 1);
    if (v(order[j]) - candidate > Scalar(0)) tau = candidate;
  }
  return (v.array() - tau).max(Scalar(0)).matrix();
}

}  // namespace detail

/// Euclidean projection onto the set.
template <typename Scalar, typename Derived>
VectorT<Scalar> project(const FeasibleSetT<Scalar>& set, const Eigen::MatrixBase<Derived>& v) {
  detail::check_dim(set, v);
  return std::visit(
      [&](const auto& s) -> VectorT<Scalar> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, BoxSet<Scalar>>) {
          return v.derived().cwiseMax(s.lower).cwiseMin(s.upper);
        } else if constexpr (std::is_same_v<S, BallSet<Scalar>>) {
          const VectorT<Scalar> offset = v - s.center;
          const Scalar norm = offset.norm();
          if (norm <= s.radius) return v;
          return s.center + (s.radius / norm) * offset;
        } else {
          return detail::project_simplex<Scalar>(v, s.scale);
        }
      },
      set.kind());
}

/// D_X = sup ||u - v||^2 over the set.
template <typename Scalar>
Scalar squared_diameter(const FeasibleSetT<Scalar>& set) {
  return std::visit(
      [](const auto& s) -> Scalar {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, BoxSet<Scalar>>) {
          return (s.upper - s.lower).squaredNorm();
        } else if constexpr (std::is_same_v<S, BallSet<Scalar>>) {
          return Scalar(4) * s.radius * s.radius;
        } else {
          // A one-dimensional simplex is the single point {scale}.
          return s.dim == 1 ? Scalar(0) : Scalar(2) * s.scale * s.scale;
        }
      },
      set.kind());
}

/// Linear diameter C = sqrt(D_X).
template <typename Scalar>
Scalar diameter(const FeasibleSetT<Scalar>& set) {
  using std::sqrt;
  return sqrt(squared_diameter(set));
}

template <typename Scalar, typename Derived>
bool contains(const FeasibleSetT<Scalar>& set, const Eigen::MatrixBase<Derived>& v, Scalar tol) {
  const VectorT<Scalar> p = project(set, v);
  return (p - v).norm() <= tol;
}

}  // namespace nashgap

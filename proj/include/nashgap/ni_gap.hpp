#pragma once

#include <cstdint>

#include "nashgap/inner_sa.hpp"

namespace nashgap {

enum class Exactness { Exact, Inexact };

struct GapEvaluation {
  double value = 0.0;
  BlockVector responder;
  Exactness exactness = Exactness::Exact;
  double epsilon = 0.0;
};

struct GradientEstimate {
  Eigen::VectorXd vector;
  double epsilon_used = 0.0;
  std::int64_t batch_size = 0;
  /// The inexact best response the estimate was assembled from.
  BlockVector responder;
};

/// Nikaido-Isoda function sum_nu [theta_nu(x) - theta_nu(y^nu, x^{-nu})].
double psi(const GameSpec& game, const BlockVector& x, const BlockVector& y);

/// psi(x, y) - alpha/2 ||x - y||^2.
double psi_alpha(const GameSpec& game, const BlockVector& x, const BlockVector& y, double alpha);

/// V_alpha(x) using the exact proximal best response.
GapEvaluation v_alpha_exact(const GameSpec& game, const BlockVector& x, double alpha,
                            double tol = 1e-10);

/// Gradient of psi_alpha(., y) at x:
///   sum_nu [grad theta_nu(x) - grad theta_nu(y^nu, x^{-nu})]
///   + stack_nu grad_{x^nu} theta_nu(y^nu, x^{-nu}) - alpha (x - y).
/// With y = y_alpha(x) this is grad V_alpha(x).
Eigen::VectorXd gap_gradient_at(const GameSpec& game, const BlockVector& x,
                                const BlockVector& y, double alpha);

Eigen::VectorXd grad_v_alpha_exact(const GameSpec& game, const BlockVector& x, double alpha,
                                   double tol = 1e-10);

/// Mini-batch estimator of grad V_alpha at x built around a given responder y.
/// Player nu's samples come from stream.child(nu).child(kOuterBatch) and are
/// shared between the terms evaluated at x and at (y^nu, x^{-nu}).
Eigen::VectorXd gap_gradient_estimate_at(const GameSpec& game, const BlockVector& x,
                                         const BlockVector& y, double alpha, std::int64_t M,
                                         const RngStream& stream);

/// Full estimator: y_{alpha,eps}(x) by stochastic approximation, then the
/// mini-batch assembly above. Both draw from sub-streams of `stream`.
GradientEstimate grad_v_alpha_estimate(const GameSpec& game, const BlockVector& x,
                                       const InnerConfig& inner, std::int64_t M,
                                       const RngStream& stream);

/// e = estimate - grad V_alpha(x).
Eigen::VectorXd gradient_error(const GameSpec& game, const BlockVector& x,
                               const GradientEstimate& estimate, double alpha,
                               double tol = 1e-10);

inline RngStream batch_stream(const RngStream& iteration, Eigen::Index nu) {
  return iteration.child(static_cast<std::uint64_t>(nu)).child(stream_tag::kOuterBatch);
}

}  // namespace nashgap

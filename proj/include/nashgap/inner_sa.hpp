#pragma once

#include <cstdint>
#include <optional>

#include "nashgap/game.hpp"

namespace nashgap {

/// Step sizes beta_i = scale / (alpha * (i + 1)). scale <= 0.5 keeps
/// beta_i < 1 / (2 alpha i) for every i >= 1.
struct BetaSchedule {
  double scale = 0.5;
  double at(std::int64_t i, double alpha) const {
    return scale / (alpha * static_cast<double>(i + 1));
  }
  bool operator==(const BetaSchedule&) const = default;
};

struct InnerConfig {
  double alpha = 1.0;
  double epsilon_target = 0.1;
  /// Smoothness constant of V_alpha used by the step-count formula. Only read
  /// when steps_override is empty.
  double l1_v_alpha = 0.0;
  std::optional<std::int64_t> steps_override;
  BetaSchedule beta;
};

/// ceil((2 L1^2 / alpha^2 + 2 D) / epsilon): SA steps that make z_T an
/// epsilon-approximation of the proximal best response.
std::int64_t sa_iteration_count(double epsilon, double l1_v_alpha, double alpha,
                                double set_diam_sq);

/// Steps solve_best_response_sa will take for player nu under cfg.
std::int64_t inner_steps(const GameSpec& game, Eigen::Index nu, const InnerConfig& cfg);

/// Projected stochastic approximation on
///   min_{y in X^nu} theta_nu(y, x^{-nu}) + alpha/2 ||x^nu - y||^2,
/// started at z_0 = x^nu. Step i draws its noise from stream.child(i).
Eigen::VectorXd solve_best_response_sa(const GameSpec& game, const BlockVector& x,
                                       Eigen::Index nu, const InnerConfig& cfg,
                                       const RngStream& stream);

/// Deterministic projected gradient on the same subproblem with step
/// 1 / (L1^nu + alpha), run until the projected-gradient residual is <= tol.
Eigen::VectorXd solve_best_response_exact(const GameSpec& game, const BlockVector& x,
                                          Eigen::Index nu, double alpha, double tol = 1e-10);

/// y_{alpha,eps}(x): one SA solve per player against the same x. Player nu uses
/// stream.child(nu).child(kInnerSa).
BlockVector solve_all_best_responses(const GameSpec& game, const BlockVector& x,
                                     const InnerConfig& cfg, const RngStream& stream);

BlockVector solve_all_best_responses_exact(const GameSpec& game, const BlockVector& x,
                                           double alpha, double tol = 1e-10);

/// Inner stream for player nu given the per-iteration stream.
inline RngStream inner_stream(const RngStream& iteration, Eigen::Index nu) {
  return iteration.child(static_cast<std::uint64_t>(nu)).child(stream_tag::kInnerSa);
}

}  // namespace nashgap

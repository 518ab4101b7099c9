#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "nashgap/constants.hpp"
#include "nashgap/outer_solver.hpp"

namespace nashgap {

struct CheckResult {
  std::string name;
  std::string description;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  /// Point estimate behind `measured` when `measured` is a confidence bound.
  double estimate = 0.0;
  /// Secondary values reported alongside (not part of the pass decision).
  std::map<std::string, double> extra;
};

struct SlopeResult {
  std::string name;
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  double low = 0.0;
  double high = 0.0;
  bool pass = false;
  std::vector<std::pair<double, double>> points;
};

struct ViolationCount {
  std::string name;
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  /// Largest lhs - rhs seen (negative when every instance holds).
  double worst_excess = 0.0;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  std::vector<SlopeResult> slopes;
  std::vector<ViolationCount> violations;

  bool all_pass() const;
  nlohmann::json to_json() const;
  /// Fixed-width table, one row per entry.
  std::string summary_table() const;
};

// Oracles ------------------------------------------------------------------

/// NE of a game with affine F: linear solve of F(x) = 0, accepted when feasible,
/// otherwise projected fixed-point iteration x <- Pi_X[x - tau F(x)]. Throws
/// ConfigError for non-quadratic games and SolverError if the VI residual does
/// not reach 1e-10.
BlockVector quadratic_ne_oracle(const GameSpec& game);

/// Natural-map residual ||x - Pi_X[x - F(x)]||.
double vi_residual(const GameSpec& game, const BlockVector& x);

/// max over a lattice of psi_alpha(x, y). psi_alpha separates over players, so
/// each block is maximized over its own lattice. Box sets only; each block's
/// lattice is limited to 1e7 points.
double brute_force_gap(const GameSpec& game, const BlockVector& x, double alpha,
                       double grid_step);

/// Central differences, step h per coordinate.
Eigen::VectorXd finite_difference_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x, double h);

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
};

/// OLS of log(value) on log(K). Needs >= 3 points and positive values.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

/// Uniform point of X: uniform on boxes, uniform on balls, flat Dirichlet on
/// simplices. Draw i uses stream.child(i).
BlockVector random_feasible_point(const GameSpec& game, const RngStream& stream,
                                  std::uint64_t i);

// Monte-Carlo checks ---------------------------------------------------------

struct MomentCheckConfig {
  double alpha = 1.0;
  double epsilon = 0.1;
  std::int64_t M = 1;
  std::int64_t reps = 100;
  /// Inner SA steps; empty means the step-count formula.
  std::optional<std::int64_t> inner_steps;
  /// Substitute the exact best response (no inner error).
  bool exact_inner = false;
};

/// Estimates E||e_{eps,M}(x)||^2 and compares the 95% upper confidence bound with
/// rho/M + mu eps. `estimate` holds the sample mean; extra["bound_4alpha_sq"] is
/// the same bound with 4 alpha^2 in place of 4 alpha.
CheckResult moment_check(const GameSpec& game, const BlockVector& x,
                         const MomentCheckConfig& cfg, const RngStream& stream);

/// Sample mean and 95% normal upper confidence bound of E||z_T - y_alpha||^2 for
/// every player's inner solve at x (summed over players).
struct InnerContractResult {
  double mean = 0.0;
  double upper95 = 0.0;
  std::int64_t steps = 0;
};
InnerContractResult inner_contract(const GameSpec& game, const BlockVector& x,
                                   const InnerConfig& inner, std::int64_t reps,
                                   const RngStream& stream);

/// Largest difference quotients of y_alpha, V_alpha and grad V_alpha over
/// `pairs` random pairs of feasible points, with violation counts against the
/// constant set.
struct LipschitzSweep {
  double max_y = 0.0;
  double max_v = 0.0;
  double max_grad = 0.0;
  std::int64_t violations_y = 0;
  std::int64_t violations_v = 0;
  std::int64_t violations_grad = 0;
  std::int64_t pairs = 0;
};
LipschitzSweep lipschitz_sweep(const GameSpec& game, const ConstantSet& c, std::int64_t pairs,
                               const RngStream& stream);

// Trace checks ---------------------------------------------------------------

/// ||G_{1/gamma_k}||^2 <= 2 ||G~_{1/gamma_k}||^2 + 2 ||e||^2 + slack at every record.
ViolationCount sandwich_violations(const RunTrace& trace, double slack = 1e-10);

/// V(x_{k+1}) <= V(x_k) - (1 - L gamma_k)(gamma_k/4)||G_{1/gamma_0}(x_k)||^2
///                + (1 - L gamma_k / 2) gamma_k ||e_k||^2 + slack.
ViolationCount descent_violations(const RunTrace& trace, double L1_V_alpha,
                                  double slack = 1e-8);

/// Right-hand side of the averaged-residual bound for one schedule:
///   [4 sum_{k=l}^{K-1} gamma_k (rho/M_k + mu eps_k) + mean V(x_l)]
///   / ((1 - L gamma_0) sum_{k=l}^{K-1} gamma_k).
double averaged_residual_bound(const RunTrace& schedule, const ConstantSet& c,
                               double mean_v_at_ell, double gamma0);

std::string format_double(double v);

}  // namespace nashgap

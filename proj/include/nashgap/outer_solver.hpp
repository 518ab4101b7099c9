#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nashgap/constants.hpp"
#include "nashgap/ni_gap.hpp"

namespace nashgap {

/// gamma_k. Diminishing rules are shifted by one (k + 1) so gamma_0 is finite.
struct GammaRule {
  enum class Kind { Constant, Diminishing, PowerDiminishing };
  Kind kind = Kind::Constant;
  double gamma0 = 0.0;
  /// Extra decay exponent for PowerDiminishing: gamma0 / (k + 1)^(0.5 + delta).
  double delta = 0.0;

  double at(std::int64_t k) const;
  std::string formula() const;
  bool operator==(const GammaRule&) const = default;
};

/// M_k.
struct BatchRule {
  enum class Kind { Linear, Sqrt, Fixed };
  Kind kind = Kind::Linear;
  double a = 1.0;
  std::int64_t M = 1;

  std::int64_t at(std::int64_t k) const;
  std::string formula() const;
  bool operator==(const BatchRule&) const = default;
};

/// eps_k, shifted by one like GammaRule.
struct EpsRule {
  enum class Kind { Harmonic, SqrtHarmonic, Fixed };
  Kind kind = Kind::Harmonic;
  double p = 1.0;
  double eps = 0.1;

  double at(std::int64_t k) const;
  std::string formula() const;
  bool operator==(const EpsRule&) const = default;
};

/// How many SA steps each inner solve gets.
struct InnerRule {
  enum class Kind {
    Formula,  // sa_iteration_count(eps_k, L1_V, alpha, D^nu)
    Scaled,   // ceil(c / eps_k)
    Fixed,    // T
    Exact     // exact best response substituted, no samples drawn
  };
  Kind kind = Kind::Formula;
  double c = 1.0;
  std::int64_t T = 1;

  std::string formula() const;
  bool operator==(const InnerRule&) const = default;
};

struct SolverConfig {
  double alpha = 1.0;
  std::int64_t K = 100;
  double lambda = 0.5;
  GammaRule gamma;
  BatchRule batch;
  EpsRule eps;
  InnerRule inner;
  BetaSchedule beta;
  /// Starting point (flat); Pi_X[0] when empty.
  std::optional<std::vector<double>> x0;
  std::uint64_t seed = 0;
  /// Store exact V_alpha, grad V_alpha, and residual diagnostics per iterate.
  bool exact_diagnostics = false;
  double exact_tol = 1e-10;

  bool operator==(const SolverConfig&) const = default;
};

/// Rejects configurations that break the hypotheses of the convergence
/// analysis; the message names the violated hypothesis.
void validate(const SolverConfig& cfg, const ConstantSet& constants);

/// l = ceil(lambda K), clamped to K - 1 so the support is never empty.
std::int64_t selection_start(double lambda, std::int64_t K);

struct IterationRecord {
  std::int64_t k = 0;
  double gamma = 0.0;
  std::int64_t M = 0;
  double eps = 0.0;
  /// psi_alpha(x_k, y_{alpha,eps}(x_k)): plug-in V_alpha estimate.
  double v_alpha = 0.0;
  /// ||G~_{1/gamma_k}(x_k)||^2 with the estimated gradient.
  double res_sq_inexact = 0.0;
  /// ||G_{1/gamma_0}(x_k)||^2 with the exact gradient (exact diagnostics).
  std::optional<double> res_sq_exact;
  std::int64_t inner_steps = 0;
  std::int64_t samples = 0;
  std::int64_t inner_steps_cum = 0;
  std::int64_t samples_cum = 0;

  // Exact diagnostics used by the per-iteration inequality checks.
  std::optional<double> v_exact;
  std::optional<double> err_sq;
  std::optional<double> res_sq_exact_beta_k;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  std::int64_t ell = 0;
  std::int64_t selected_index = 0;
  BlockVector final_point;
  BlockVector selected_point;
  /// ||G_{1/gamma_0}(x_R)||^2, always computed from the deterministic objectives.
  double res_sq_at_selected = 0.0;
  /// Sum_j P(R = j) ||G_{1/gamma_0}(x_j)||^2 (exact diagnostics only).
  std::optional<double> res_sq_expected_over_r;
  /// V_alpha(x_l) (exact diagnostics only).
  std::optional<double> v_exact_at_ell;
  /// V_alpha(x_K) (exact diagnostics only).
  std::optional<double> v_exact_final;
};

/// Thrown when a run hits a non-finite value; carries the trace so far.
class RunAborted : public SolverError {
 public:
  RunAborted(const std::string& what, RunTrace partial)
      : SolverError(what), partial_(std::move(partial)) {}
  const RunTrace& partial() const { return partial_; }

 private:
  RunTrace partial_;
};

/// G_beta(x) = beta (x - Pi_X[x - grad / beta]).
Eigen::VectorXd residual_map(const GameSpec& game, const BlockVector& x, double beta,
                             const Eigen::VectorXd& grad);

struct StepResult {
  BlockVector next;
  IterationRecord record;
};

/// One iteration: inexact best response, mini-batch gradient, projected step.
/// `constants` is required only by the Formula inner rule and by exact diagnostics.
StepResult step(const GameSpec& game, const BlockVector& x_k, std::int64_t k,
                const SolverConfig& cfg, const ConstantSet* constants,
                const RngStream& stream);

/// P(R = j) = gamma_j / sum_{i=l}^{K-1} gamma_i for j = l..K-1.
std::vector<double> iterate_pmf(const GammaRule& gamma, std::int64_t ell, std::int64_t K);

/// Draws R on {l, ..., K-1} from iterate_pmf. Throws unless K > l.
std::int64_t select_random_iterate(const GammaRule& gamma, std::int64_t ell, std::int64_t K,
                                   const RngStream& stream);

struct RegularityCheck {
  bool holds = false;
  double value = 0.0;
};

/// (sum_nu [grad theta_nu(x) - grad theta_nu(y^nu, x^{-nu})])^T (x - y) > 0 with
/// y = y_alpha(x). When ||x - y|| <= tol the point is an equilibrium candidate
/// and (true, 0) is returned.
RegularityCheck check_regularity(const GameSpec& game, const BlockVector& x, double alpha,
                                 double tol = 1e-8);

/// K iterations of the inexact projected gradient scheme for replication `rep`
/// (stream RngStream(seed).child(rep)), then random-iterate selection.
RunTrace run(const GameSpec& game, const SolverConfig& cfg, std::uint64_t rep = 0);

/// run() for every K in Ks from one trajectory of length max(Ks). Schedules do
/// not depend on K and step k always draws from the same stream, so each
/// element equals run(game, cfg with that K, rep) exactly; cfg.K is ignored.
std::vector<RunTrace> run_grid(const GameSpec& game, const SolverConfig& cfg,
                               const std::vector<std::int64_t>& Ks, std::uint64_t rep = 0);

/// Starting point of cfg for this game (validated to be feasible).
BlockVector starting_point(const GameSpec& game, const SolverConfig& cfg);

}  // namespace nashgap

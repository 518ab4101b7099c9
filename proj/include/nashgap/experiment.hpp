#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nashgap/bench_games.hpp"
#include "nashgap/detail/parallel.hpp"
#include "nashgap/outer_solver.hpp"
#include "nashgap/verification.hpp"

namespace nashgap {

inline constexpr int kSchemaVersion = 1;

/// Fully resolved experiment description. parse_config fills every default, so
/// two configs compare equal iff they describe the same experiment.
struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string game;
  std::map<std::string, double> game_params;
  SolverConfig solver;
  std::int64_t replications = 1;
  /// When non-empty, every K here is run (from one trajectory per replication)
  /// and solver.K is ignored.
  std::vector<std::int64_t> K_grid;
  int threads = 1;
  std::vector<std::string> suites;
  /// Acceptance band for the fitted log-log slope of mean ||G||^2 versus K.
  std::optional<std::pair<double, double>> slope_band;
  std::string output_dir = "nashgap_out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Strict JSON parser: unknown keys are errors, SolverConfig hypotheses are
/// validated. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);

/// Canonical JSON text with every field explicit.
std::string serialize_config(const ExperimentConfig& cfg);

/// Suites accepted by `verify` and by the config's "suites" list.
std::vector<std::string> suite_names();

struct SuiteOptions {
  double alpha = 0.0;  // 0: default 2 max L_G
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Runs one named verification suite on a catalog game, appending to report.
void run_suite(const std::string& suite, const CatalogEntry& entry, const SuiteOptions& opt,
               VerificationReport& report, std::ostream& log);

/// Default alpha for a game: 2 max_nu L_G^nu (1 when every L_G is zero).
double default_alpha(const GameSpec& game);

/// Per-replication result of an experiment, one trace per K.
struct ReplicationResult {
  std::vector<RunTrace> traces;
  std::optional<std::string> aborted;
};

/// Replications of cfg.solver over the K grid.
std::vector<ReplicationResult> run_replications(const GameSpec& game, const ExperimentConfig& cfg);

/// CSV text of one trace.
std::string trace_csv(const RunTrace& trace, bool exact_diagnostics);

inline constexpr const char* kCsvHeader =
    "k,gamma_k,M_k,eps_k,v_alpha,res_sq_inexact,res_sq_exact,inner_steps_cum,samples_cum";

/// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Runs the experiment, writes traces, summary.json, manifest.json and (when
/// checks are enabled) report.json into the output directory. NASHGAP_OUTPUT_DIR
/// overrides cfg.output_dir. Returns an exit code.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace nashgap

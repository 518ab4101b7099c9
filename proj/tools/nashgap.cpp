// nashgap command-line interface.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nashgap/experiment.hpp"

using namespace nashgap;

namespace {

std::map<std::string, double> parse_params(const std::vector<std::string>& kv) {
  std::map<std::string, double> out;
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("game parameter '" + s + "' is not key=value");
    try {
      out[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("game parameter '" + s + "' has a non-numeric value");
    }
  }
  return out;
}

int cmd_run(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    std::cerr << "cannot read " << path << "\n";
    return kExitConfigError;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str());
  return run_experiment(cfg, std::cout);
}

int cmd_verify(const std::string& game, const std::string& suite, double alpha,
               std::uint64_t seed, int threads, const std::vector<std::string>& params,
               const std::string& json_out) {
  const CatalogEntry entry = make_game(game, parse_params(params));
  for (const auto& w : entry.warnings) std::cout << "warning: " << w << "\n";
  SuiteOptions opt;
  opt.alpha = alpha;
  opt.seed = seed;
  opt.threads = threads;
  VerificationReport report;
  run_suite(suite, entry, opt, report, std::cout);
  std::cout << report.summary_table();
  if (!json_out.empty()) {
    std::ofstream o(json_out);
    o << report.to_json().dump(2) << "\n";
  }
  return report.all_pass() ? kExitPass : kExitCheckFailure;
}

int cmd_list() {
  for (const auto& name : game_names()) {
    std::printf("%-14s %s\n", name.c_str(), game_description(name).c_str());
  }
  return kExitPass;
}

int cmd_constants(const std::string& game, double alpha, const std::vector<std::string>& params) {
  const CatalogEntry entry = make_game(game, parse_params(params));
  const double a = alpha > 0.0 ? alpha : default_alpha(entry.game);
  const ConstantSet c = compute_constants(entry.game, a);
  std::printf("game           %s\n", entry.game.name.c_str());
  std::printf("alpha          %.17g\n", c.alpha);
  std::printf("L0_y_alpha     %.17g\n", c.L0_y_alpha);
  std::printf("L0_V_alpha     %.17g\n", c.L0_V_alpha);
  std::printf("L1_V_alpha     %.17g\n", c.L1_V_alpha);
  std::printf("rho            %.17g\n", c.rho);
  std::printf("mu             %.17g\n", c.mu);
  std::printf("mu (alpha^2)   %.17g\n", c.mu_alpha_squared);
  std::printf("gamma0 default %.17g\n", 1.0 / (2.0 * c.L1_V_alpha));
  for (std::size_t nu = 0; nu < c.per_player.size(); ++nu) {
    const auto& p = c.per_player[nu];
    std::printf("player %zu       L0 %.6g  L1 %.6g  LG %.6g  C %.6g  D %.6g\n", nu, p.L0, p.L1,
                p.LG, p.C, p.D);
  }
  if (entry.known_ne) {
    std::printf("known NE      ");
    for (Eigen::Index i = 0; i < entry.known_ne->size(); ++i)
      std::printf(" %.12g", entry.known_ne->flat()[i]);
    std::printf("\n");
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nash equilibria of stochastic games via the regularized Nikaido-Isoda gap"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("config", config_path, "config file")->required();

  std::string game, suite = "all", json_out;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> params;
  auto* verify = app.add_subcommand("verify", "run verification suites on a catalog game");
  verify->add_option("game", game, "catalog game")->required();
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  verify->add_option("--suite", suite, "suite to run")->check(CLI::IsMember(suites));
  verify->add_option("--alpha", alpha, "regularization (default 2 max L_G)");
  verify->add_option("--seed", seed, "root seed");
  verify->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--param", params, "game parameter override key=value");
  verify->add_option("--json", json_out, "write the report as JSON");

  app.add_subcommand("list-games", "list catalog games");

  std::string cgame;
  double calpha = 0.0;
  std::vector<std::string> cparams;
  auto* consts = app.add_subcommand("print-constants", "print the constant ledger for a game");
  consts->add_option("game", cgame, "catalog game")->required();
  consts->add_option("--alpha", calpha, "regularization (default 2 max L_G)");
  consts->add_option("--param", cparams, "game parameter override key=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*verify) return cmd_verify(game, suite, alpha, seed, threads, params, json_out);
    if (app.got_subcommand("list-games")) return cmd_list();
    if (*consts) return cmd_constants(cgame, calpha, cparams);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
  return kExitConfigError;
}

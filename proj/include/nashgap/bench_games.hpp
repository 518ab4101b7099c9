#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nashgap/game.hpp"

namespace nashgap {

/// Player cost theta(x) = 1/2 x^T Q x + q^T x over the joint vector, with noise
/// sign * sigma / sqrt(d) * xi^T x^nu added to the sampled cost (xi standard
/// normal in R^d, d = own block size), so the sampled gradient is unbiased with
/// E||noise||^2 = sigma^2.
struct QuadraticPlayer {
  Eigen::MatrixXd Q;  // symmetric n x n
  Eigen::VectorXd q;
  double noise_sign = 1.0;
};

struct CatalogEntry {
  GameSpec game;
  std::optional<BlockVector> known_ne;
  bool strongly_monotone = false;
  bool nonmonotone_regular = false;
  /// Violations of the regularity inner-product condition on the construction
  /// sweep; -1 when no sweep was run.
  int regularity_violations = -1;
  int regularity_points = 0;
  double regularity_alpha = 0.0;
  std::vector<std::string> warnings;
  /// Resolved construction parameters.
  std::map<std::string, double> params;
};

/// Game from explicit quadratic players over box sets. Constants are exact:
/// L1 = ||Q||_2, LG = L1, L0 = max of ||Q x + q|| over the box (attained at a
/// vertex because the norm of an affine map is convex).
GameSpec make_quadratic_game(std::string name, std::vector<QuadraticPlayer> players,
                             std::vector<FeasibleSet> sets, std::vector<Eigen::Index> dims,
                             double sigma);

/// theta_nu = 1/2 ||x^nu||^2 + c x^nu . mean_{mu != nu} x^mu + b_nu . x^nu on
/// [lower, upper]^d per player; sampled cost perturbs b_nu. Requires |c| < 1.
CatalogEntry make_quadratic(int N, double c, double sigma, double lower, double upper,
                            std::vector<double> b, int block_dim = 1);

struct CournotParams {
  int N = 2;
  double capacity = 10.0;
  double intercept = 10.0;
  double slope = 1.0;
  std::vector<double> linear_cost;     // c1_nu, defaults to 1
  std::vector<double> quadratic_cost;  // c2_nu >= 0, defaults to 0.5
  double sigma = 0.5;
};

/// theta_nu = c1 x + c2/2 x^2 - x (A - B sum x) on [0, capacity], with the
/// sampled cost perturbing the intercept A.
CatalogEntry make_cournot(const CournotParams& p);

/// Two players with asymmetric cross terms:
///   theta_1 = 1/2 x1^2 + c12 x1 x2 + b1 x1,  theta_2 = 1/2 x2^2 + c21 x1 x2 + b2 x2
/// on [lower, upper]^2. Rejects parameters whose symmetrized Jacobian is not
/// indefinite, then sweeps the regularity condition on a grid x grid lattice.
CatalogEntry make_nonmonotone_regular(double c12 = 2.5, double c21 = 0.1, double b1 = -1.0,
                                      double b2 = -0.5, double lower = -1.0, double upper = 1.0,
                                      double sigma = 0.0, int grid = 41,
                                      std::optional<double> alpha = std::nullopt);

/// theta(x) = x^2 on [-1, 1]; sampled gradient 2x + sigma xi.
CatalogEntry make_scalar(double sigma = 0.0);

/// Catalog names, in listing order.
std::vector<std::string> game_names();
std::string game_description(const std::string& name);

/// Named game with parameter overrides. Throws ConfigError for unknown names or
/// override keys.
CatalogEntry make_game(const std::string& name,
                       const std::map<std::string, double>& overrides = {});

}  // namespace nashgap

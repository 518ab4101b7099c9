#include "nashgap/bench_games.hpp"

#include <cmath>
#include <memory>

#include "nashgap/constants.hpp"
#include "nashgap/outer_solver.hpp"
#include "nashgap/verification.hpp"

namespace nashgap {

namespace {

PlayerObjective quadratic_objective(std::shared_ptr<const QuadraticPlayer> qp, Eigen::Index nu,
                                    Eigen::Index d, double sigma) {
  const double scale = qp->noise_sign * sigma / std::sqrt(static_cast<double>(d));
  PlayerObjective p;
  p.own_block = nu;
  p.noise_dim = d;
  p.value = [qp](const BlockVector& x) {
    const auto& v = x.flat();
    return 0.5 * v.dot(qp->Q * v) + qp->q.dot(v);
  };
  p.grad = [qp](const BlockVector& x) -> Eigen::VectorXd { return qp->Q * x.flat() + qp->q; };
  p.sampled_value = [qp, nu, scale](const BlockVector& x, const NoiseDraw& xi) {
    const auto& v = x.flat();
    return 0.5 * v.dot(qp->Q * v) + qp->q.dot(v) + scale * xi.values.dot(x.block(nu));
  };
  p.sampled_grad = [qp, nu, scale](const BlockVector& x,
                                   const NoiseDraw& xi) -> Eigen::VectorXd {
    Eigen::VectorXd g = qp->Q * x.flat() + qp->q;
    g.segment(x.offset(nu), x.block_dim(nu)) += scale * xi.values;
    return g;
  };
  return p;
}

double max_grad_norm_on_box(const QuadraticPlayer& qp, const std::vector<FeasibleSet>& sets) {
  std::vector<double> lo, hi;
  for (const auto& s : sets) {
    const BoxSet<double>* bp = s.as_box();
    if (bp == nullptr) throw ConfigError("quadratic games are built on box sets");
    const BoxSet<double>& b = *bp;
    for (Eigen::Index i = 0; i < b.lower.size(); ++i) {
      lo.push_back(b.lower[i]);
      hi.push_back(b.upper[i]);
    }
  }
  const auto n = static_cast<Eigen::Index>(lo.size());
  if (n > 20) throw ConfigError("vertex enumeration limited to n <= 20");
  double best = 0.0;
  Eigen::VectorXd v(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
    best = std::max(best, (qp.Q * v + qp.q).norm());
  }
  return best;
}

std::vector<double> fill(std::vector<double> v, std::size_t n, double def) {
  if (v.empty()) v.assign(n, def);
  if (v.size() != n) throw ConfigError("per-player parameter has the wrong length");
  return v;
}

}  // namespace

GameSpec make_quadratic_game(std::string name, std::vector<QuadraticPlayer> players,
                             std::vector<FeasibleSet> sets, std::vector<Eigen::Index> dims,
                             double sigma) {
  if (players.size() != sets.size() || players.size() != dims.size())
    throw ConfigError(name + ": players, sets and dims must have equal length");
  Eigen::Index n = 0;
  for (auto d : dims) n += d;
  GameSpec g;
  g.name = std::move(name);
  g.noise_sigma = sigma;
  g.quadratic = true;
  g.sets = std::move(sets);
  for (std::size_t nu = 0; nu < players.size(); ++nu) {
    auto& qp = players[nu];
    if (qp.Q.rows() != n || qp.Q.cols() != n || qp.q.size() != n)
      throw ConfigError(g.name + ": player " + std::to_string(nu) + " has wrong Q/q shape");
    if ((qp.Q - qp.Q.transpose()).norm() > 1e-12)
      throw ConfigError(g.name + ": Q must be symmetric");
    if (g.sets[nu].dim() != dims[nu]) throw ConfigError(g.name + ": set/block dim mismatch");
    PlayerSmoothness s;
    s.L1 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(qp.Q).eigenvalues().cwiseAbs().maxCoeff();
    s.LG = s.L1;
    s.L0 = max_grad_norm_on_box(qp, g.sets);
    g.smoothness.push_back(s);
    g.players.push_back(quadratic_objective(std::make_shared<const QuadraticPlayer>(qp),
                                            static_cast<Eigen::Index>(nu), dims[nu], sigma));
  }
  g.validate();
  return g;
}

CatalogEntry make_quadratic(int N, double c, double sigma, double lower, double upper,
                            std::vector<double> b, int block_dim) {
  if (N < 1) throw ConfigError("quadratic: N must be >= 1");
  if (!(std::abs(c) < 1.0)) throw ConfigError("quadratic: |c| < 1 keeps F strongly monotone");
  if (block_dim < 1 || block_dim > 3) throw ConfigError("quadratic: block_dim must be 1..3");
  if (!(lower < upper)) throw ConfigError("quadratic: lower < upper required");
  if (!(sigma >= 0.0)) throw ConfigError("quadratic: sigma must be >= 0");
  b = fill(std::move(b), static_cast<std::size_t>(N), -1.0);
  const Eigen::Index d = block_dim;
  const Eigen::Index n = N * d;
  const double w = N > 1 ? c / (N - 1) : 0.0;

  std::vector<QuadraticPlayer> players;
  std::vector<FeasibleSet> sets;
  std::vector<Eigen::Index> dims;
  for (Eigen::Index nu = 0; nu < N; ++nu) {
    QuadraticPlayer qp{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 1.0};
    qp.Q.block(nu * d, nu * d, d, d).setIdentity();
    for (Eigen::Index mu = 0; mu < N; ++mu) {
      if (mu == nu) continue;
      qp.Q.block(nu * d, mu * d, d, d) = w * Eigen::MatrixXd::Identity(d, d);
      qp.Q.block(mu * d, nu * d, d, d) = w * Eigen::MatrixXd::Identity(d, d);
    }
    qp.q.segment(nu * d, d).setConstant(b[static_cast<std::size_t>(nu)]);
    players.push_back(std::move(qp));
    sets.push_back(FeasibleSet::box(Eigen::VectorXd::Constant(d, lower),
                                    Eigen::VectorXd::Constant(d, upper)));
    dims.push_back(d);
  }
  CatalogEntry e;
  e.game = make_quadratic_game("quadratic" + std::to_string(N), std::move(players),
                               std::move(sets), std::move(dims), sigma);
  e.strongly_monotone = true;
  e.known_ne = quadratic_ne_oracle(e.game);
  e.params = {{"N", N}, {"c", c}, {"sigma", sigma}, {"lower", lower}, {"upper", upper},
              {"block_dim", block_dim}};
  for (int nu = 0; nu < N; ++nu) e.params["b" + std::to_string(nu)] = b[nu];
  return e;
}

CatalogEntry make_cournot(const CournotParams& p) {
  if (p.N < 1) throw ConfigError("cournot: N must be >= 1");
  if (!(p.slope > 0.0)) throw ConfigError("cournot: demand slope must be > 0");
  if (!(p.capacity > 0.0)) throw ConfigError("cournot: capacity must be > 0");
  if (!(p.sigma >= 0.0)) throw ConfigError("cournot: sigma must be >= 0");
  const auto N = static_cast<Eigen::Index>(p.N);
  const auto c1 = fill(p.linear_cost, static_cast<std::size_t>(N), 1.0);
  const auto c2 = fill(p.quadratic_cost, static_cast<std::size_t>(N), 0.5);
  for (double v : c2)
    if (!(v >= 0.0)) throw ConfigError("cournot: quadratic cost must be >= 0");

  std::vector<QuadraticPlayer> players;
  std::vector<FeasibleSet> sets;
  for (Eigen::Index nu = 0; nu < N; ++nu) {
    const auto i = static_cast<std::size_t>(nu);
    // -x_nu (A - B sum x) = -A x_nu + B x_nu^2 + B x_nu sum_{mu != nu} x_mu
    QuadraticPlayer qp{Eigen::MatrixXd::Zero(N, N), Eigen::VectorXd::Zero(N), -1.0};
    qp.Q(nu, nu) = c2[i] + 2.0 * p.slope;
    for (Eigen::Index mu = 0; mu < N; ++mu) {
      if (mu == nu) continue;
      qp.Q(nu, mu) = p.slope;
      qp.Q(mu, nu) = p.slope;
    }
    qp.q[nu] = c1[i] - p.intercept;
    players.push_back(std::move(qp));
    sets.push_back(FeasibleSet::interval(0.0, p.capacity));
  }
  CatalogEntry e;
  e.game = make_quadratic_game("cournot" + std::to_string(N), std::move(players),
                               std::move(sets), std::vector<Eigen::Index>(static_cast<std::size_t>(N), 1),
                               p.sigma);
  e.strongly_monotone = true;
  e.known_ne = quadratic_ne_oracle(e.game);
  e.params = {{"N", p.N}, {"capacity", p.capacity}, {"intercept", p.intercept},
              {"slope", p.slope}, {"sigma", p.sigma}};
  for (std::size_t i = 0; i < c1.size(); ++i) {
    e.params["c1_" + std::to_string(i)] = c1[i];
    e.params["c2_" + std::to_string(i)] = c2[i];
  }
  return e;
}

CatalogEntry make_nonmonotone_regular(double c12, double c21, double b1, double b2,
                                      double lower, double upper, double sigma, int grid,
                                      std::optional<double> alpha) {
  if (!(lower < upper)) throw ConfigError("nonmonotone: lower < upper required");
  if (grid < 2) throw ConfigError("nonmonotone: sweep grid needs >= 2 points per axis");
  Eigen::Matrix2d J;
  J << 1.0, c12, c21, 1.0;
  const Eigen::Vector2d eig =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(0.5 * (J + J.transpose())).eigenvalues();
  if (!(eig.minCoeff() < 0.0 && eig.maxCoeff() > 0.0))
    throw ConfigError("nonmonotone: symmetrized Jacobian is not indefinite (|c12 + c21| / 2 "
                      "must exceed 1)");

  QuadraticPlayer p1{Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2), 1.0};
  p1.Q << 1.0, c12, c12, 0.0;
  p1.q << b1, 0.0;
  QuadraticPlayer p2{Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2), 1.0};
  p2.Q << 0.0, c21, c21, 1.0;
  p2.q << 0.0, b2;
  // Own-block curvature is 1 for both players.
  if (!(p1.Q(0, 0) > 0.0 && p2.Q(1, 1) > 0.0))
    throw ConfigError("nonmonotone: per-player convexity fails");

  CatalogEntry e;
  e.game = make_quadratic_game("nonmonotone2", {p1, p2},
                               {FeasibleSet::interval(lower, upper),
                                FeasibleSet::interval(lower, upper)},
                               {1, 1}, sigma);
  e.nonmonotone_regular = true;
  e.known_ne = quadratic_ne_oracle(e.game);

  double max_lg = 0.0;
  for (const auto& s : e.game.smoothness) max_lg = std::max(max_lg, s.LG);
  const double a = alpha.value_or(2.0 * max_lg);
  e.regularity_alpha = a;
  e.regularity_violations = 0;
  e.regularity_points = grid * grid;
  const double h = (upper - lower) / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      BlockVector x = BlockVector::from_blocks(
          {Eigen::VectorXd::Constant(1, lower + i * h), Eigen::VectorXd::Constant(1, lower + j * h)});
      if (!check_regularity(e.game, x, a).holds) ++e.regularity_violations;
    }
  }
  if (e.regularity_violations > 0)
    e.warnings.push_back("regularity condition fails at " +
                         std::to_string(e.regularity_violations) + " of " +
                         std::to_string(e.regularity_points) + " sweep points");
  e.params = {{"c12", c12}, {"c21", c21}, {"b1", b1}, {"b2", b2}, {"lower", lower},
              {"upper", upper}, {"sigma", sigma}, {"grid", grid}, {"alpha", a}};
  return e;
}

CatalogEntry make_scalar(double sigma) {
  if (!(sigma >= 0.0)) throw ConfigError("scalar: sigma must be >= 0");
  QuadraticPlayer qp{Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Zero(1), 1.0};
  CatalogEntry e;
  e.game = make_quadratic_game("scalar1", {qp}, {FeasibleSet::interval(-1.0, 1.0)}, {1}, sigma);
  e.strongly_monotone = true;
  e.known_ne = BlockVector::from_blocks({Eigen::VectorXd::Zero(1)});
  e.params = {{"sigma", sigma}};
  return e;
}

std::vector<std::string> game_names() {
  return {"quadratic2", "cournot2", "scalar1", "nonmonotone2"};
}

std::string game_description(const std::string& name) {
  if (name == "quadratic2")
    return "2-player quadratic, c = 0.5, b = (-1, -1), X = [-2, 2]^2, sigma = 1";
  if (name == "cournot2")
    return "Cournot duopoly, A = 10, B = 1, costs x + x^2/4, capacity 10, sigma = 0.5";
  if (name == "scalar1") return "theta(x) = x^2 on [-1, 1], sigma = 0";
  if (name == "nonmonotone2")
    return "2-player, c12 = 2.5, c21 = 0.1, b = (-1, -0.5), X = [-1, 1]^2, F not monotone";
  throw ConfigError("unknown game '" + name + "'");
}

namespace {

class Overrides {
 public:
  Overrides(const std::string& game, const std::map<std::string, double>& o)
      : game_(game), o_(o) {}
  double get(const std::string& key, double def) {
    used_.push_back(key);
    auto it = o_.find(key);
    return it == o_.end() ? def : it->second;
  }
  int get_int(const std::string& key, int def) {
    const double v = get(key, def);
    if (v != std::floor(v)) throw ConfigError(game_ + ": parameter '" + key + "' must be an integer");
    return static_cast<int>(v);
  }
  std::vector<double> per_player(const std::string& prefix, int N, double def) {
    std::vector<double> out;
    for (int i = 0; i < N; ++i) out.push_back(get(prefix + std::to_string(i), def));
    return out;
  }
  void finish() const {
    for (const auto& [k, v] : o_) {
      bool known = false;
      for (const auto& u : used_) known = known || u == k;
      if (!known) throw ConfigError(game_ + ": unknown game parameter '" + k + "'");
    }
  }

 private:
  std::string game_;
  const std::map<std::string, double>& o_;
  std::vector<std::string> used_;
};

}  // namespace

CatalogEntry make_game(const std::string& name, const std::map<std::string, double>& overrides) {
  Overrides o(name, overrides);
  CatalogEntry e;
  if (name == "quadratic2") {
    const int N = o.get_int("N", 2);
    const double c = o.get("c", 0.5);
    const double sigma = o.get("sigma", 1.0);
    const double lo = o.get("lower", -2.0);
    const double hi = o.get("upper", 2.0);
    const int d = o.get_int("block_dim", 1);
    auto b = o.per_player("b", N, -1.0);
    o.finish();
    e = make_quadratic(N, c, sigma, lo, hi, std::move(b), d);
    e.game.name = name;
  } else if (name == "cournot2") {
    CournotParams p;
    p.N = o.get_int("N", 2);
    p.capacity = o.get("capacity", 10.0);
    p.intercept = o.get("intercept", 10.0);
    p.slope = o.get("slope", 1.0);
    p.sigma = o.get("sigma", 0.5);
    p.linear_cost = o.per_player("c1_", p.N, 1.0);
    p.quadratic_cost = o.per_player("c2_", p.N, 0.5);
    o.finish();
    e = make_cournot(p);
    e.game.name = name;
  } else if (name == "scalar1") {
    const double sigma = o.get("sigma", 0.0);
    o.finish();
    e = make_scalar(sigma);
  } else if (name == "nonmonotone2") {
    const double c12 = o.get("c12", 2.5);
    const double c21 = o.get("c21", 0.1);
    const double b1 = o.get("b1", -1.0);
    const double b2 = o.get("b2", -0.5);
    const double lo = o.get("lower", -1.0);
    const double hi = o.get("upper", 1.0);
    const double sigma = o.get("sigma", 0.0);
    const int grid = o.get_int("grid", 41);
    std::optional<double> alpha;
    if (overrides.count("alpha")) alpha = o.get("alpha", 0.0);
    else o.get("alpha", 0.0);
    o.finish();
    e = make_nonmonotone_regular(c12, c21, b1, b2, lo, hi, sigma, grid, alpha);
  } else {
    throw ConfigError("unknown game '" + name + "'");
  }
  return e;
}

}  // namespace nashgap

// Command-line front end: gen, check, simulate, estimate, bounds, sweep.

#include "driftrec/basis.hpp"
#include "driftrec/bounds.hpp"
#include "driftrec/ensembles.hpp"
#include "driftrec/estimator.hpp"
#include "driftrec/harness.hpp"
#include "driftrec/io.hpp"
#include "driftrec/linalg.hpp"
#include "driftrec/lyapunov.hpp"
#include "driftrec/sim.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

using namespace driftrec;

namespace {

void emit_json(const nlohmann::json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw InvalidArgument("cannot write " + out);
  f << j.dump(2) << "\n";
}

struct GenArgs {
  std::string ensemble = "sparse-shift";
  int p = 16;
  int k = 4;
  double theta_min = 1.0;
  double rho = 1.0;
  double m = 1.0;
  double shift = 7.0;
  std::uint64_t seed = 1;
  std::string entry_law = "gaussian";
  std::string graph_mode = "uniform-regular";
  std::string adjacency;
  std::string out;
};

int run_gen(const GenArgs& a) {
  DriftMatrix dm;
  switch (parse_ensemble_kind(a.ensemble)) {
    case EnsembleKind::sparse_shift: dm = gen_sparse_shift(a.p, a.k, a.shift, a.seed); break;
    case EnsembleKind::dense:
      dm = gen_dense(a.p, a.rho, a.seed,
                     a.entry_law == "rademacher" ? EntryLaw::rademacher : EntryLaw::gaussian);
      break;
    case EnsembleKind::dense_symmetric: dm = gen_dense_symmetric(a.p, a.theta_min, a.rho, a.seed); break;
    case EnsembleKind::signed_regular: dm = gen_signed_regular(a.p, a.k, a.theta_min, a.rho, a.seed); break;
    case EnsembleKind::laplacian:
      if (!a.adjacency.empty()) {
        dm = gen_laplacian(io::load_matrix(a.adjacency), a.m);
      } else {
        GraphSpec g;
        g.p = a.p;
        g.k = a.k;
        g.seed = a.seed;
        g.mode = a.graph_mode == "bounded-degree-bernoulli" ? GraphMode::bounded_degree_bernoulli
                                                            : GraphMode::uniform_regular;
        dm = gen_laplacian(g, a.m);
      }
      break;
    case EnsembleKind::custom: throw InvalidArgument("gen: 'custom' matrices are loaded, not generated");
  }
  if (a.out.empty() || a.out == "-") io::write_matrix(std::cout, dm.entries);
  else io::save_matrix(a.out, dm.entries);
  return 0;
}

struct CheckArgs {
  std::string theta;
  int row = -1;
  std::optional<double> eta;
  std::string out;
};

int run_check(const CheckArgs& a) {
  const Matrix theta = io::load_matrix(a.theta);
  // Loaded matrices are not exactly sparse by construction.
  const double tol = 1e-12;
  const StationaryCovariance cov = a.eta ? solve_discrete(theta, *a.eta) : solve_continuous(theta);
  if (a.row >= 0) {
    emit_json(io::to_json(assumption_report(theta, cov, a.row, a.eta, tol)), a.out);
    return 0;
  }
  // The theorems quantify over every row, so the aggregate takes the worst row:
  // min of alpha, c_min and theta_min, max of k. Degenerate rows (empty support) are skipped.
  nlohmann::json rows = nlohmann::json::array();
  double alpha = std::numeric_limits<double>::infinity(), c_min = alpha, theta_min = alpha;
  int k = 0;
  for (int r = 0; r < theta.rows(); ++r) {
    const AssumptionReport rep = assumption_report(theta, cov, r, a.eta, tol);
    rows.push_back(io::to_json(rep));
    if (rep.degenerate) continue;
    alpha = std::min(alpha, rep.alpha);
    c_min = std::min(c_min, rep.c_min);
    theta_min = std::min(theta_min, rep.theta_min_observed);
    k = std::max(k, rep.k_observed);
  }
  nlohmann::json agg;
  agg["alpha"] = alpha;
  agg["c_min"] = c_min;
  agg["theta_min"] = theta_min;
  agg["k"] = k;
  agg["rho_min"] = linalg::rho_min(theta);
  if (a.eta) agg["d"] = *assumption_report(theta, cov, 0, a.eta, tol).d;
  emit_json({{"rows", rows}, {"aggregate", agg}}, a.out);
  return 0;
}

struct SimulateArgs {
  std::string model = "discrete";
  std::string theta;
  std::string adjacency;
  double eta = 0.1;
  std::optional<int> n;
  std::optional<double> T;
  std::optional<double> eta_fine;
  int dim = 2;
  double gamma = 0.1;
  double sigma = 0.5;
  double spread = 1.0;
  bool zero_force = false;
  std::uint64_t seed = 1;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  Trajectory traj;
  if (a.model == "mass-spring") {
    require(!a.adjacency.empty(), "simulate: mass-spring needs --adjacency");
    require(a.T.has_value(), "simulate: mass-spring needs --T");
    MassSpringParams params = make_mass_spring(io::load_matrix(a.adjacency), a.dim, a.gamma, a.sigma);
    params.zero_force = a.zero_force;
    Rng rng = make_rng(mix_seed(a.seed, 1));
    const Vector q0 = random_positions(params.masses(), a.dim, a.spread, rng);
    traj = simulate_mass_spring(params, a.eta, *a.T, q0, Vector::Zero(q0.size()), a.seed);
  } else {
    require(!a.theta.empty(), "simulate: --theta is required");
    const Matrix theta = io::load_matrix(a.theta);
    if (a.model == "discrete") {
      require(a.n.has_value() != a.T.has_value(), "simulate: give exactly one of --n and --T");
      const int n = a.n ? *a.n : static_cast<int>(std::llround(*a.T / a.eta));
      const Vector x0 = sample_stationary_init(solve_discrete(theta, a.eta), mix_seed(a.seed, 1));
      traj = simulate_discrete(theta, a.eta, n, x0, a.seed);
    } else if (a.model == "continuous") {
      require(a.T.has_value(), "simulate: continuous model needs --T");
      const double fine = a.eta_fine ? *a.eta_fine : a.eta / 10.0;
      const Vector x0 = sample_stationary_init(solve_continuous(theta), mix_seed(a.seed, 1));
      traj = simulate_continuous(theta, *a.T, a.eta, fine, x0, a.seed);
    } else {
      throw InvalidArgument("simulate: unknown model '" + a.model + "'");
    }
  }
  if (a.out.empty() || a.out == "-") io::write_trajectory(std::cout, traj);
  else io::save_trajectory(a.out, traj);
  return 0;
}

struct EstimateArgs {
  std::string traj;
  std::string basis = "linear";
  int dim = 2;
  std::optional<double> lambda;
  std::optional<double> alpha, rho_min;
  double delta = 0.1;
  double tol = 1e-8;
  int max_iter = 100000;
  std::optional<double> zero_threshold;
  std::optional<double> threshold_theta_min;
  std::string out;
};

int run_estimate(const EstimateArgs& a) {
  const Trajectory traj = io::load_trajectory(a.traj);
  const BasisKind kind = parse_basis_kind(a.basis);
  int vars = traj.dim();
  if (kind == BasisKind::mass_spring) {
    require(traj.dim() % (2 * a.dim) == 0, "estimate: state length is not 2*p*d");
    vars = traj.dim() / (2 * a.dim);
  }
  const BasisSet basis = make_basis(kind, vars, a.dim);
  RecoveryResult result;
  if (a.threshold_theta_min) {
    result = threshold_estimator(traj, basis, *a.threshold_theta_min);
  } else {
    RlsConfig cfg;
    cfg.tol = a.tol;
    cfg.max_iter = a.max_iter;
    cfg.zero_threshold = a.zero_threshold;
    if (a.lambda) {
      cfg.lambda = *a.lambda;
    } else {
      require(a.alpha && a.rho_min, "estimate: give --lambda, or --alpha and --rho-min for the default rule");
      cfg.lambda = bounds::lambda_theorem1(traj.n() * traj.eta, *a.alpha, *a.rho_min, basis.size(), a.delta);
    }
    result = recover(traj, basis, cfg);
  }
  emit_json(io::to_json(result, basis.names()), a.out);
  return result.all_converged() ? 0 : 3;
}

struct BoundsArgs {
  std::string theorem;
  int k = 1, p = 100;
  double rho = 1.0, theta_min = 1.0, alpha = 1.0, c_min = 1.0, delta = 0.1;
  double d = 1.0, m = 1.0, b = 1.0, l = 1.0, c = -1.0;
  std::optional<double> T;
  double entropy = 0.0, log_alphabet = 0.0, mi = 0.0;
  std::optional<double> denominator;
  std::string out;
};

int run_bounds(const BoundsArgs& a) {
  bounds::BoundReport r;
  const double c_lower = a.c < 0.0 ? 1.0 : a.c;
  if (a.theorem == "1") r = bounds::ub_sparse_continuous(a.k, a.rho, a.theta_min, a.alpha, a.c_min, a.p, a.delta);
  else if (a.theorem == "2") r = bounds::lb_sparse(a.k, a.rho, a.theta_min, a.p, c_lower);
  else if (a.theorem == "3") r = bounds::ub_laplacian(a.k, a.m, a.p, a.delta);
  else if (a.theorem == "4") r = bounds::ub_discrete(a.k, a.d, a.theta_min, a.alpha, a.c_min, a.p, a.delta);
  else if (a.theorem == "5") r = bounds::lb_dense(a.rho, a.theta_min, a.p, c_lower);
  else if (a.theorem == "6") r = bounds::lb_nonlinear(a.k, a.p, a.b, a.l, a.d, a.c < 0.0 ? 0.0 : a.c);
  else if (a.theorem == "lemma7") {
    require(a.denominator.has_value(), "bounds: lemma7 needs --denominator");
    r = bounds::lb_generic(a.entropy, a.log_alphabet, a.mi, *a.denominator);
  } else {
    throw InvalidArgument("bounds: unknown theorem '" + a.theorem + "'");
  }
  nlohmann::json j = io::to_json(r);
  if (a.T && r.lambda_at) {
    j["T"] = *a.T;
    j["lambda"] = r.lambda_at(*a.T);
  }
  emit_json(j, a.out);
  return 0;
}

int run_sweep_cmd(const std::string& config, const std::string& out_dir, int threads) {
  harness::SweepSpec spec = harness::load_sweep_config(config);
  if (threads >= 0) spec.threads = threads;
  const auto result = harness::run_sweep(spec, [](const std::string& msg) { std::cerr << msg << "\n"; });
  harness::write_sweep_outputs(result, out_dir);
  for (const auto& e : result.errors) std::cerr << "incomplete: " << e << "\n";
  return result.complete ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driftrec: signed-support recovery for SDE drifts"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a drift matrix");
  g->add_option("--ensemble", gen.ensemble, "sparse-shift|dense|dense-symmetric|signed-regular|laplacian");
  g->add_option("--p", gen.p);
  g->add_option("--k", gen.k);
  g->add_option("--theta-min", gen.theta_min);
  g->add_option("--rho", gen.rho);
  g->add_option("--m", gen.m);
  g->add_option("--shift", gen.shift);
  g->add_option("--seed", gen.seed);
  g->add_option("--entry-law", gen.entry_law, "gaussian|rademacher (dense)");
  g->add_option("--graph-mode", gen.graph_mode, "uniform-regular|bounded-degree-bernoulli (laplacian)");
  g->add_option("--adjacency", gen.adjacency, "adjacency matrix file (laplacian)");
  g->add_option("--out", gen.out);

  CheckArgs check;
  auto* c = app.add_subcommand("check", "assumption report of a drift matrix");
  c->add_option("--theta", check.theta)->required();
  c->add_option("--row", check.row, "row index; all rows when omitted");
  c->add_option("--eta", check.eta, "use the discrete model with this step");
  c->add_option("--out", check.out);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate a trajectory");
  s->add_option("--model", sim.model, "discrete|continuous|mass-spring");
  s->add_option("--theta", sim.theta);
  s->add_option("--adjacency", sim.adjacency);
  s->add_option("--eta", sim.eta, "sampling interval (time step for mass-spring)");
  s->add_option("--n", sim.n);
  s->add_option("--T", sim.T);
  s->add_option("--eta-fine", sim.eta_fine);
  s->add_option("--dim", sim.dim);
  s->add_option("--gamma", sim.gamma);
  s->add_option("--sigma", sim.sigma);
  s->add_option("--spread", sim.spread, "std of the random initial positions");
  s->add_flag("--zero-force", sim.zero_force, "coincident connected masses exert no force");
  s->add_option("--seed", sim.seed);
  s->add_option("--out", sim.out);

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "recover the signed support from a trajectory");
  e->add_option("--traj", est.traj)->required();
  e->add_option("--basis", est.basis, "linear|monomial2|mass-spring");
  e->add_option("--dim", est.dim, "spatial dimension (mass-spring)");
  e->add_option("--lambda", est.lambda);
  e->add_option("--alpha", est.alpha);
  e->add_option("--rho-min", est.rho_min);
  e->add_option("--delta", est.delta);
  e->add_option("--tol", est.tol);
  e->add_option("--max-iter", est.max_iter);
  e->add_option("--zero-threshold", est.zero_threshold);
  e->add_option("--threshold", est.threshold_theta_min, "use the λ=0 threshold rule with this theta_min");
  e->add_option("--out", est.out);

  BoundsArgs bnd;
  auto* b = app.add_subcommand("bounds", "evaluate a sample-complexity bound");
  b->add_option("--theorem", bnd.theorem, "1|2|3|4|5|6|lemma7")->required();
  b->add_option("--k", bnd.k);
  b->add_option("--p", bnd.p);
  b->add_option("--rho", bnd.rho);
  b->add_option("--theta-min", bnd.theta_min);
  b->add_option("--alpha", bnd.alpha);
  b->add_option("--c-min", bnd.c_min);
  b->add_option("--delta", bnd.delta);
  b->add_option("--d", bnd.d);
  b->add_option("--m", bnd.m);
  b->add_option("--B", bnd.b);
  b->add_option("--L", bnd.l);
  b->add_option("--C", bnd.c, "constant of the lower bounds");
  b->add_option("--T", bnd.T, "horizon at which to report the suggested λ");
  b->add_option("--entropy", bnd.entropy);
  b->add_option("--log-alphabet", bnd.log_alphabet);
  b->add_option("--mi", bnd.mi);
  b->add_option("--denominator", bnd.denominator);
  b->add_option("--out", bnd.out);

  std::string config, out_dir = ".";
  int threads = -1;
  auto* w = app.add_subcommand("sweep", "run a Monte-Carlo sweep from a config file");
  w->add_option("config", config)->required();
  w->add_option("--out-dir", out_dir);
  w->add_option("--threads", threads);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*g) return run_gen(gen);
    if (*c) return run_check(check);
    if (*s) return run_simulate(sim);
    if (*e) return run_estimate(est);
    if (*b) return run_bounds(bnd);
    if (*w) return run_sweep_cmd(config, out_dir, threads);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

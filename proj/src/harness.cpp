#include "driftrec/harness.hpp"

#include "driftrec/basis.hpp"
#include "driftrec/estimator.hpp"
#include "driftrec/sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

namespace driftrec::harness {

std::string to_string(SweepEnsemble e) {
  switch (e) {
    case SweepEnsemble::sparse_shift: return "sparse-shift";
    case SweepEnsemble::dense: return "dense";
    case SweepEnsemble::signed_regular: return "signed-regular";
    case SweepEnsemble::laplacian: return "laplacian";
    case SweepEnsemble::mass_spring: return "mass-spring";
    case SweepEnsemble::pathway: return "pathway";
  }
  return "?";
}

std::string to_string(SuccessMode m) {
  return m == SuccessMode::full_matrix ? "full-matrix" : "single-random-row";
}

std::string to_string(EstimatorKind e) { return e == EstimatorKind::rls ? "rls" : "threshold"; }

SweepEnsemble parse_sweep_ensemble(const std::string& s) {
  for (auto e : {SweepEnsemble::sparse_shift, SweepEnsemble::dense, SweepEnsemble::signed_regular,
                 SweepEnsemble::laplacian, SweepEnsemble::mass_spring, SweepEnsemble::pathway}) {
    if (to_string(e) == s) return e;
  }
  throw InvalidArgument("unknown sweep ensemble '" + s + "'");
}

SuccessMode parse_success_mode(const std::string& s) {
  if (s == "full-matrix") return SuccessMode::full_matrix;
  if (s == "single-random-row") return SuccessMode::single_random_row;
  throw InvalidArgument("unknown success mode '" + s + "'");
}

EstimatorKind parse_estimator_kind(const std::string& s) {
  if (s == "rls") return EstimatorKind::rls;
  if (s == "threshold") return EstimatorKind::threshold;
  throw InvalidArgument("unknown estimator '" + s + "'");
}

void SweepSpec::validate() const {
  require(!p_values.empty(), "sweep: p list is empty");
  require(!horizons.empty(), "sweep: horizon grid is empty");
  require(!etas.empty(), "sweep: eta list is empty");
  require(instances >= 1, "sweep: instances must be >= 1");
  require(delta > 0.0 && delta < 1.0, "sweep: delta must lie in (0, 1)");
  require(std::is_sorted(horizons.begin(), horizons.end()), "sweep: horizons must be ascending");
  for (double T : horizons) require(T > 0.0, "sweep: horizons must be positive");
  for (double e : etas) require(e > 0.0, "sweep: eta must be positive");
  for (int p : p_values) require(p >= 1, "sweep: p must be >= 1");
  require(eta_fine_ratio >= 1, "sweep: eta_fine_ratio must be >= 1");
  require(lambda_points >= 1 && lambda_lo > 0.0 && lambda_hi >= lambda_lo,
          "sweep: bad automatic lambda grid");
  for (double l : lambdas) require(l >= 0.0, "sweep: lambda must be >= 0");
  require(tol > 0.0 && max_iter >= 1, "sweep: need tol > 0 and max_iter >= 1");
  require(threads >= 0, "sweep: threads must be >= 0");
  const bool nonlinear =
      ensemble == SweepEnsemble::mass_spring || ensemble == SweepEnsemble::pathway;
  require(!(nonlinear && model == Model::continuous),
          "sweep: nonlinear ensembles are simulated with the discrete Euler step only");
  if (ensemble == SweepEnsemble::pathway) {
    for (int p : p_values) require(p == 9, "sweep: the pathway model has p = 9");
  }
  if (ensemble == SweepEnsemble::mass_spring) {
    require(dim >= 1 && gamma > 0.0 && sigma >= 0.0, "sweep: bad mass-spring parameters");
  }
  for (int p : p_values) {
    for (double e : etas) {
      for (double T : horizons) {
        const double n = T / e;
        require(std::abs(n - std::round(n)) < 1e-6 * std::max(1.0, n) && std::round(n) >= 1,
                "sweep: every horizon must be a positive multiple of every eta");
      }
    }
    (void)p;
  }
}

std::vector<double> SweepSpec::lambda_grid(int p, double T) const {
  if (!lambdas.empty()) return lambdas;
  const double scale = std::sqrt(std::log(4.0 * p / delta) / T);
  std::vector<double> out(lambda_points);
  for (int i = 0; i < lambda_points; ++i) {
    const double t = lambda_points == 1 ? 0.0 : double(i) / (lambda_points - 1);
    out[i] = scale * lambda_lo * std::pow(lambda_hi / lambda_lo, t);
  }
  return out;
}

const CellResult& SweepResult::cell(int p, double eta, double horizon) const {
  for (const auto& c : cells) {
    if (c.p == p && c.eta == eta && c.horizon == horizon) return c;
  }
  throw InvalidArgument("sweep result has no such cell");
}

double binomial_se(int successes, int total) {
  if (total <= 0) return 0.0;
  const double f = double(successes) / total;
  return std::sqrt(f * (1.0 - f) / total);
}

double nrmse(const Matrix& theta_hat, const Matrix& theta0) {
  require(theta_hat.rows() == theta0.rows() && theta_hat.cols() == theta0.cols(),
          "nrmse: dimension mismatch");
  const double denom = theta0.norm();
  require(denom > 0.0, "nrmse: reference matrix is zero");
  return (theta_hat - theta0).norm() / denom;
}

RocCurve roc_auc(const IntMatrix& truth, const std::vector<IntMatrix>& supports,
                 const std::vector<double>& lambdas) {
  require(supports.size() == lambdas.size(), "roc_auc: one support per lambda");
  long long positives = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) positives += truth.data()[i] != 0;
  const long long negatives = truth.size() - positives;
  require(positives > 0 && negatives > 0, "roc_auc: truth needs positive and negative entries");

  std::vector<std::size_t> order(lambdas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });
  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  for (std::size_t idx : order) {
    const IntMatrix& s = supports[idx];
    require(s.rows() == truth.rows() && s.cols() == truth.cols(), "roc_auc: shape mismatch");
    long long tp = 0, fp = 0;
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
      if (s.data()[i] == 0) continue;
      if (truth.data()[i] != 0) ++tp; else ++fp;
    }
    curve.points.push_back({lambdas[idx], double(fp) / negatives, double(tp) / positives});
  }
  curve.points.push_back({0.0, 1.0, 1.0});
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    curve.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return curve;
}

std::optional<std::size_t> first_sustained_index(const std::vector<double>& success,
                                                 double delta) {
  std::optional<std::size_t> first;
  for (std::size_t i = success.size(); i-- > 0;) {
    if (success[i] >= 1.0 - delta) first = i;
    else break;
  }
  return first;
}

std::vector<ComplexityEntry> empirical_sample_complexity(const SweepResult& result,
                                                         double delta) {
  std::vector<ComplexityEntry> out;
  for (int p : result.spec.p_values) {
    for (double eta : result.spec.etas) {
      std::vector<double> best;
      std::vector<double> horizon;
      for (const auto& c : result.cells) {
        if (c.p == p && c.eta == eta) {
          best.push_back(c.best_success);
          horizon.push_back(c.horizon);
        }
      }
      ComplexityEntry e{p, eta, std::nullopt};
      if (auto idx = first_sustained_index(best, delta)) e.horizon = horizon[*idx];
      out.push_back(e);
    }
  }
  return out;
}

namespace {

/// What one instance contributes at one (η, T) point.
struct Snapshot {
  std::vector<char> success;
  double auc = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> nrmse;
};

struct InstanceOutcome {
  bool ok = false;
  std::string error;
  std::vector<std::vector<Snapshot>> snaps;  // [eta][horizon]
};

/// The drift of one instance: coefficients over a basis, the rows to score,
/// and how to simulate it.
struct Problem {
  std::unique_ptr<BasisSet> basis;
  Matrix truth;
  std::vector<int> rows;
  std::optional<MassSpringParams> mass_spring;
  bool linear = true;
};

Matrix draw_linear(const SweepSpec& spec, int p, std::uint64_t seed) {
  switch (spec.ensemble) {
    case SweepEnsemble::sparse_shift: return gen_sparse_shift(p, spec.k, spec.shift, seed).entries;
    case SweepEnsemble::dense: return gen_dense(p, spec.rho, seed, spec.entry_law).entries;
    case SweepEnsemble::signed_regular:
      return gen_signed_regular(p, spec.k, spec.theta_min, spec.rho, seed).entries;
    case SweepEnsemble::laplacian: {
      GraphSpec g;
      g.p = p;
      g.k = spec.k;
      g.mode = GraphMode::bounded_degree_bernoulli;
      g.seed = seed;
      return gen_laplacian(g, spec.m).entries;
    }
    default: break;
  }
  throw InvalidArgument("draw_linear: not a linear ensemble");
}

Problem make_problem(const SweepSpec& spec, int p, std::uint64_t seed, Rng& rng) {
  Problem prob;
  std::vector<std::vector<int>> groups;  // row groups; single-row mode scores one group
  if (spec.ensemble == SweepEnsemble::mass_spring) {
    GraphSpec g;
    g.p = p;
    g.k = spec.k;
    g.mode = GraphMode::uniform_regular;
    g.seed = seed;
    g.require_connected = true;
    MassSpringParams params = make_mass_spring(gen_graph(g), spec.dim, spec.gamma, spec.sigma);
    prob.truth = mass_spring_coefficients(params);
    prob.basis = std::make_unique<BasisSet>(mass_spring_basis(p, spec.dim));
    prob.mass_spring = std::move(params);
    prob.linear = false;
    // The q rows are the kinematic identity dq = v dt; the network lives in the v rows.
    const int pd = p * spec.dim;
    for (int i = 0; i < p; ++i) {
      std::vector<int> group;
      for (int a = 0; a < spec.dim; ++a) group.push_back(pd + i * spec.dim + a);
      groups.push_back(group);
    }
  } else if (spec.ensemble == SweepEnsemble::pathway) {
    PathwayParams params;
    params.sigma = spec.sigma;
    prob.truth = pathway_coefficients(params);
    prob.basis = std::make_unique<BasisSet>(monomial_basis_deg2(9));
    prob.linear = false;
    for (int r = 0; r < 9; ++r) groups.push_back({r});
  } else {
    prob.truth = draw_linear(spec, p, seed);
    prob.basis = std::make_unique<BasisSet>(linear_basis(p));
    for (int r = 0; r < p; ++r) groups.push_back({r});
  }
  if (spec.success_mode == SuccessMode::full_matrix) {
    for (const auto& g : groups) prob.rows.insert(prob.rows.end(), g.begin(), g.end());
  } else {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(groups.size()) - 1);
    prob.rows = groups[pick(rng)];
  }
  return prob;
}

double smallest_nonzero(const Matrix& truth, const std::vector<int>& rows) {
  double out = std::numeric_limits<double>::infinity();
  for (int r : rows) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      const double v = std::abs(truth(r, j));
      if (v > 0.0) out = std::min(out, v);
    }
  }
  return out;
}

Snapshot evaluate(const SweepSpec& spec, const Problem& prob, const NormalAccumulator& acc,
                  const std::vector<double>& lambdas) {
  const Matrix Q = acc.qhat();
  const Matrix G = acc.ghat();
  const int m = prob.basis->size();
  const int nrows = static_cast<int>(prob.rows.size());
  Matrix truth_rows(nrows, m);
  IntMatrix truth_signs(nrows, m);
  for (int i = 0; i < nrows; ++i) {
    truth_rows.row(i) = prob.truth.row(prob.rows[i]);
    truth_signs.row(i) = sign_pattern(truth_rows.row(i).transpose(), 0.0).transpose();
  }

  Snapshot snap;
  if (spec.estimator == EstimatorKind::threshold) {
    snap.success.assign(1, 0);
    Eigen::LLT<Matrix> llt(Q);
    if (llt.info() != Eigen::Success) return snap;
    const double theta_min = smallest_nonzero(prob.truth, prob.rows);
    Matrix est(nrows, m);
    bool all = true;
    for (int i = 0; i < nrows; ++i) {
      const Vector coef = llt.solve(G.col(prob.rows[i]));
      est.row(i) = coef.transpose();
      if (threshold_signs(coef, theta_min) != truth_signs.row(i).transpose()) all = false;
    }
    snap.success[0] = all;
    if (spec.compute_nrmse) snap.nrmse.push_back(nrmse(est, truth_rows));
    return snap;
  }

  const int L = static_cast<int>(lambdas.size());
  RlsConfig cfg;
  cfg.tol = spec.tol;
  cfg.max_iter = spec.max_iter;
  cfg.zero_threshold = spec.zero_threshold;
  std::vector<Matrix> est(L, Matrix(nrows, m));
  std::vector<IntMatrix> signs(L, IntMatrix(nrows, m));
  snap.success.assign(L, 1);
  for (int i = 0; i < nrows; ++i) {
    const auto path = solve_rls_path(Q, G.col(prob.rows[i]), lambdas, cfg);
    for (int l = 0; l < L; ++l) {
      const Vector& coef = path[l].coef;
      const double zt = spec.zero_threshold ? *spec.zero_threshold : default_zero_threshold(coef);
      const Eigen::VectorXi s = sign_pattern(coef, zt);
      est[l].row(i) = coef.transpose();
      signs[l].row(i) = s.transpose();
      if (s != truth_signs.row(i).transpose()) snap.success[l] = 0;
    }
  }
  if (spec.compute_auc) snap.auc = roc_auc(truth_signs, signs, lambdas).auc;
  if (spec.compute_nrmse) {
    for (int l = 0; l < L; ++l) snap.nrmse.push_back(nrmse(est[l], truth_rows));
  }
  return snap;
}

long long steps_for(double T, double step) { return std::llround(T / step); }

InstanceOutcome run_instance(const SweepSpec& spec, int p, int inst) {
  InstanceOutcome out;
  const std::uint64_t seed = mix_seed(spec.base_seed, static_cast<std::uint64_t>(p),
                                      static_cast<std::uint64_t>(inst));
  const int E = static_cast<int>(spec.etas.size());
  const int H = static_cast<int>(spec.horizons.size());
  out.snaps.assign(E, std::vector<Snapshot>(H));
  try {
    Rng row_rng = make_rng(mix_seed(seed, 4));
    Problem prob = make_problem(spec, p, mix_seed(seed, 1), row_rng);
    const BasisSet& basis = *prob.basis;

    if (prob.linear && spec.model == Model::continuous) {
      const StationaryCovariance cov = solve_continuous(prob.truth);
      const double fine = *std::min_element(spec.etas.begin(), spec.etas.end()) /
                          spec.eta_fine_ratio;
      std::vector<int> factor(E);
      std::vector<NormalAccumulator> accs;
      accs.reserve(E);
      for (int e = 0; e < E; ++e) {
        factor[e] = subsample_factor(spec.etas[e], fine);
        accs.emplace_back(basis, spec.etas[e]);
      }
      std::vector<Vector> prev(E, sample_stationary_init(cov, mix_seed(seed, 2)));
      LinearStepper stepper(prob.truth, fine, prev[0], mix_seed(seed, 3));
      const long long total = steps_for(spec.horizons.back(), fine);
      std::vector<int> next(E, 0);
      for (long long s = 1; s <= total; ++s) {
        stepper.advance();
        for (int e = 0; e < E; ++e) {
          if (s % factor[e] != 0) continue;
          accs[e].push(prev[e], stepper.state());
          prev[e] = stepper.state();
          while (next[e] < H &&
                 accs[e].count() == steps_for(spec.horizons[next[e]], spec.etas[e])) {
            out.snaps[e][next[e]] =
                evaluate(spec, prob, accs[e], spec.lambda_grid(p, spec.horizons[next[e]]));
            ++next[e];
          }
        }
      }
      out.ok = true;
      return out;
    }

    for (int e = 0; e < E; ++e) {
      const double eta = spec.etas[e];
      NormalAccumulator acc(basis, eta);
      const std::uint64_t noise_seed = mix_seed(seed, 3, e);
      // Each model provides a stepper with advance() and state().
      auto record = [&](auto& stepper) {
        Vector prev = stepper.state();
        int next = 0;
        const long long total = steps_for(spec.horizons.back(), eta);
        for (long long s = 1; s <= total; ++s) {
          stepper.advance();
          acc.push(prev, stepper.state());
          prev = stepper.state();
          while (next < H && acc.count() == steps_for(spec.horizons[next], eta)) {
            out.snaps[e][next] = evaluate(spec, prob, acc, spec.lambda_grid(p, spec.horizons[next]));
            ++next;
          }
        }
      };
      if (prob.linear) {
        const StationaryCovariance cov = solve_discrete(prob.truth, eta);
        LinearStepper stepper(prob.truth, eta, sample_stationary_init(cov, mix_seed(seed, 2, e)),
                              noise_seed);
        record(stepper);
      } else if (prob.mass_spring) {
        const int pd = p * spec.dim;
        Rng init_rng = make_rng(mix_seed(seed, 2, e));
        Vector x0 = Vector::Zero(2 * pd);
        x0.head(pd) = random_positions(p, spec.dim, 1.0, init_rng);
        MassSpringStepper stepper(*prob.mass_spring, eta, x0, noise_seed);
        for (long long s = steps_for(spec.burn_in, eta); s > 0; --s) stepper.advance();
        record(stepper);
      } else {
        BasisDriftStepper stepper(prob.truth, basis, eta, spec.sigma, Vector::Ones(9),
                                  noise_seed);
        for (long long s = steps_for(spec.burn_in, eta); s > 0; --s) stepper.advance();
        record(stepper);
      }
    }
    out.ok = true;
  } catch (const NumericalError& err) {
    out.ok = false;
    out.error = err.what();
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const ProgressFn& progress) {
  spec.validate();
  SweepResult result;
  result.spec = spec;
  const int E = static_cast<int>(spec.etas.size());
  const int H = static_cast<int>(spec.horizons.size());
  int threads = spec.threads > 0 ? spec.threads
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, spec.instances);

  for (int p : spec.p_values) {
    std::vector<InstanceOutcome> outcomes(spec.instances);
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int i = next++; i < spec.instances; i = next++) outcomes[i] = run_instance(spec, p, i);
    };
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    int failed = 0;
    for (const auto& o : outcomes) {
      if (o.ok) continue;
      ++failed;
      if (result.errors.size() < 20) {
        result.errors.push_back("p=" + std::to_string(p) + ": " + o.error);
      }
    }
    if (failed > 0) result.complete = false;

    for (int e = 0; e < E; ++e) {
      for (int h = 0; h < H; ++h) {
        CellResult cell;
        cell.p = p;
        cell.eta = spec.etas[e];
        cell.horizon = spec.horizons[h];
        cell.n = steps_for(cell.horizon, cell.eta);
        cell.failed = failed;
        cell.lambdas = spec.estimator == EstimatorKind::threshold
                           ? std::vector<double>{0.0}
                           : spec.lambda_grid(p, cell.horizon);
        const std::size_t L = cell.lambdas.size();
        cell.successes.assign(L, 0);
        double auc_sum = 0.0, auc_sq = 0.0;
        int auc_count = 0;
        std::vector<double> nrmse_sum;
        for (const auto& o : outcomes) {
          if (!o.ok) continue;
          ++cell.total;
          const Snapshot& s = o.snaps[e][h];
          for (std::size_t l = 0; l < L; ++l) cell.successes[l] += s.success[l];
          if (!std::isnan(s.auc)) {
            auc_sum += s.auc;
            auc_sq += s.auc * s.auc;
            ++auc_count;
          }
          if (!s.nrmse.empty()) {
            nrmse_sum.resize(s.nrmse.size(), 0.0);
            for (std::size_t l = 0; l < s.nrmse.size(); ++l) nrmse_sum[l] += s.nrmse[l];
          }
        }
        if (cell.total > 0) {
          const auto best = std::max_element(cell.successes.begin(), cell.successes.end());
          cell.best_lambda = static_cast<int>(best - cell.successes.begin());
          cell.best_success = double(*best) / cell.total;
          cell.best_se = binomial_se(*best, cell.total);
          for (double v : nrmse_sum) cell.nrmse_mean.push_back(v / cell.total);
        }
        if (auc_count > 0) {
          const double mean = auc_sum / auc_count;
          const double var = auc_count > 1
                                 ? std::max(0.0, (auc_sq - auc_count * mean * mean) / (auc_count - 1))
                                 : 0.0;
          cell.auc_mean = mean;
          cell.auc_se = std::sqrt(var / auc_count);
        }
        result.cells.push_back(std::move(cell));
      }
    }
    if (progress) {
      std::ostringstream msg;
      msg << "p=" << p << " done (" << spec.instances - failed << "/" << spec.instances
          << " instances)";
      progress(msg.str());
    }
  }
  result.complexity = empirical_sample_complexity(result, spec.delta);
  return result;
}

// --- configuration -------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw InvalidArgument("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) throw InvalidArgument("config: '" + key + "' expects an integer");
  return static_cast<long long>(d);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument("config: '" + key + "' expects true/false");
}

}  // namespace

SweepSpec parse_sweep_config(const std::string& text) {
  SweepSpec spec;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::optional<std::vector<double>> geom;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key == "ensemble") spec.ensemble = parse_sweep_ensemble(v);
    else if (key == "model") {
      if (v == "discrete") spec.model = Model::discrete;
      else if (v == "continuous") spec.model = Model::continuous;
      else throw InvalidArgument("config: model must be discrete or continuous");
    } else if (key == "p") {
      spec.p_values.clear();
      for (const auto& s : split_list(v)) spec.p_values.push_back(static_cast<int>(to_int(key, s)));
    } else if (key == "horizons") spec.horizons = to_doubles(key, v);
    else if (key == "horizon_geom") geom = to_doubles(key, v);
    else if (key == "eta") spec.etas = to_doubles(key, v);
    else if (key == "eta_fine_ratio") spec.eta_fine_ratio = static_cast<int>(to_int(key, v));
    else if (key == "k") spec.k = static_cast<int>(to_int(key, v));
    else if (key == "shift") spec.shift = to_double(key, v);
    else if (key == "rho") spec.rho = to_double(key, v);
    else if (key == "theta_min") spec.theta_min = to_double(key, v);
    else if (key == "m") spec.m = to_double(key, v);
    else if (key == "entry_law") {
      if (v == "gaussian") spec.entry_law = EntryLaw::gaussian;
      else if (v == "rademacher") spec.entry_law = EntryLaw::rademacher;
      else throw InvalidArgument("config: entry_law must be gaussian or rademacher");
    } else if (key == "dim") spec.dim = static_cast<int>(to_int(key, v));
    else if (key == "gamma") spec.gamma = to_double(key, v);
    else if (key == "sigma") spec.sigma = to_double(key, v);
    else if (key == "burn_in") spec.burn_in = to_double(key, v);
    else if (key == "lambdas") spec.lambdas = to_doubles(key, v);
    else if (key == "lambda_points") spec.lambda_points = static_cast<int>(to_int(key, v));
    else if (key == "lambda_lo") spec.lambda_lo = to_double(key, v);
    else if (key == "lambda_hi") spec.lambda_hi = to_double(key, v);
    else if (key == "zero_threshold") spec.zero_threshold = to_double(key, v);
    else if (key == "tol") spec.tol = to_double(key, v);
    else if (key == "max_iter") spec.max_iter = static_cast<int>(to_int(key, v));
    else if (key == "estimator") spec.estimator = parse_estimator_kind(v);
    else if (key == "success_mode") spec.success_mode = parse_success_mode(v);
    else if (key == "instances") spec.instances = static_cast<int>(to_int(key, v));
    else if (key == "delta") spec.delta = to_double(key, v);
    else if (key == "seed") spec.base_seed = static_cast<std::uint64_t>(to_int(key, v));
    else if (key == "auc") spec.compute_auc = to_bool(key, v);
    else if (key == "nrmse") spec.compute_nrmse = to_bool(key, v);
    else if (key == "threads") spec.threads = static_cast<int>(to_int(key, v));
    else throw InvalidArgument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (geom) {
    // lo, hi, count: geometric grid rounded to multiples of the largest eta.
    require(geom->size() == 3, "config: horizon_geom = lo, hi, count");
    const double lo = (*geom)[0], hi = (*geom)[1];
    const int count = static_cast<int>((*geom)[2]);
    require(lo > 0.0 && hi >= lo && count >= 1, "config: bad horizon_geom");
    const double unit = *std::max_element(spec.etas.begin(), spec.etas.end());
    spec.horizons.clear();
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : double(i) / (count - 1);
      const double T = std::max(1.0, std::round(lo * std::pow(hi / lo, t) / unit)) * unit;
      if (spec.horizons.empty() || T > spec.horizons.back()) spec.horizons.push_back(T);
    }
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep_config(ss.str());
}

// --- outputs -------------------------------------------------------------------

namespace {

nlohmann::json spec_json(const SweepSpec& s) {
  nlohmann::json j;
  j["ensemble"] = to_string(s.ensemble);
  j["model"] = s.model == Model::continuous ? "continuous" : "discrete";
  j["p"] = s.p_values;
  j["horizons"] = s.horizons;
  j["eta"] = s.etas;
  j["eta_fine_ratio"] = s.eta_fine_ratio;
  j["k"] = s.k;
  j["shift"] = s.shift;
  j["rho"] = s.rho;
  j["theta_min"] = s.theta_min;
  j["m"] = s.m;
  j["entry_law"] = s.entry_law == EntryLaw::gaussian ? "gaussian" : "rademacher";
  j["dim"] = s.dim;
  j["gamma"] = s.gamma;
  j["sigma"] = s.sigma;
  j["burn_in"] = s.burn_in;
  j["lambdas"] = s.lambdas;
  j["lambda_points"] = s.lambda_points;
  j["lambda_lo"] = s.lambda_lo;
  j["lambda_hi"] = s.lambda_hi;
  j["zero_threshold"] = s.zero_threshold ? nlohmann::json(*s.zero_threshold) : nlohmann::json();
  j["tol"] = s.tol;
  j["max_iter"] = s.max_iter;
  j["estimator"] = to_string(s.estimator);
  j["success_mode"] = to_string(s.success_mode);
  j["instances"] = s.instances;
  j["delta"] = s.delta;
  j["seed"] = s.base_seed;
  return j;
}

std::string eta_suffix(double eta) {
  std::ostringstream ss;
  ss << "_eta" << eta;
  return ss.str();
}

}  // namespace

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["spec"] = spec_json(result.spec);
  j["complete"] = result.complete;
  j["errors"] = result.errors;
  for (const auto& c : result.cells) {
    nlohmann::json cj;
    cj["p"] = c.p;
    cj["eta"] = c.eta;
    cj["horizon"] = c.horizon;
    cj["n"] = c.n;
    cj["total"] = c.total;
    cj["failed"] = c.failed;
    cj["lambdas"] = c.lambdas;
    cj["successes"] = c.successes;
    cj["best_lambda"] = c.lambdas[c.best_lambda];
    cj["best_success"] = c.best_success;
    cj["best_se"] = c.best_se;
    if (c.auc_mean) {
      cj["auc"] = *c.auc_mean;
      cj["auc_se"] = *c.auc_se;
    }
    if (!c.nrmse_mean.empty()) cj["nrmse"] = c.nrmse_mean;
    j["cells"].push_back(cj);
  }
  for (const auto& e : result.complexity) {
    nlohmann::json ej{{"p", e.p}, {"eta", e.eta}};
    ej["n_eta_at_delta"] = e.horizon ? nlohmann::json(*e.horizon) : nlohmann::json();
    j["complexity"].push_back(ej);
  }
  std::ofstream(dir / "results.json") << j.dump(2) << "\n";

  const bool many = result.spec.etas.size() > 1;
  for (double eta : result.spec.etas) {
    const std::string suffix = many ? eta_suffix(eta) : "";
    for (int p : result.spec.p_values) {
      std::ofstream csv(dir / ("curve_" + std::to_string(p) + suffix + ".csv"));
      csv << "n_eta,success,se\n";
      for (const auto& c : result.cells) {
        if (c.p == p && c.eta == eta) csv << c.horizon << "," << c.best_success << "," << c.best_se << "\n";
      }
    }
    std::ofstream csv(dir / ("complexity" + suffix + ".csv"));
    csv << "p,n_eta_at_delta\n";
    for (const auto& e : result.complexity) {
      if (e.eta != eta) continue;
      csv << e.p << ",";
      if (e.horizon) csv << *e.horizon;
      else csv << "not-reached";
      csv << "\n";
    }
  }
}

}  // namespace driftrec::harness

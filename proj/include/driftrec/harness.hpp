#pragma once

#include "driftrec/common.hpp"
#include "driftrec/ensembles.hpp"
#include "driftrec/lyapunov.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace driftrec::harness {

enum class SweepEnsemble { sparse_shift, dense, signed_regular, laplacian, mass_spring, pathway };
enum class SuccessMode { single_random_row, full_matrix };
enum class EstimatorKind { rls, threshold };

std::string to_string(SweepEnsemble e);
std::string to_string(SuccessMode m);
std::string to_string(EstimatorKind e);
SweepEnsemble parse_sweep_ensemble(const std::string& s);
SuccessMode parse_success_mode(const std::string& s);
EstimatorKind parse_estimator_kind(const std::string& s);

/// One Monte-Carlo experiment. Cells are indexed by p; every instance of a
/// cell simulates a single path up to the longest horizon and the estimator
/// is evaluated on its prefixes, so the horizon grid costs one simulation.
struct SweepSpec {
  SweepEnsemble ensemble = SweepEnsemble::sparse_shift;
  Model model = Model::discrete;
  std::vector<int> p_values;
  /// Observation horizons T = n·η, ascending.
  std::vector<double> horizons;
  /// Sampling intervals. For the continuous model all of them are taken from
  /// one fine path; for the discrete model each η has its own path.
  std::vector<double> etas{0.1};
  /// Continuous model: eta_fine = min(etas)/eta_fine_ratio.
  int eta_fine_ratio = 10;

  // ensemble parameters (unused ones are ignored)
  int k = 4;
  double shift = 7.0;
  double rho = 1.0;
  double theta_min = 1.0;
  double m = 1.0;
  EntryLaw entry_law = EntryLaw::gaussian;
  int dim = 2;          // mass-spring spatial dimension
  double gamma = 0.1;   // mass-spring damping
  double sigma = 0.5;   // noise level of the nonlinear models
  double burn_in = 100.0;  // time discarded before recording nonlinear paths

  /// Absolute λ values. Empty selects the automatic grid
  /// λ = f·√(log(4p/δ)/T) with f log-spaced in [lambda_lo, lambda_hi].
  std::vector<double> lambdas;
  int lambda_points = 20;
  double lambda_lo = 1e-3;
  double lambda_hi = 10.0;
  std::optional<double> zero_threshold;
  double tol = 1e-8;
  int max_iter = 100000;

  EstimatorKind estimator = EstimatorKind::rls;
  SuccessMode success_mode = SuccessMode::single_random_row;
  int instances = 256;
  double delta = 0.1;
  std::uint64_t base_seed = 1;
  bool compute_auc = false;
  bool compute_nrmse = false;
  /// Worker threads; 0 uses the hardware concurrency.
  int threads = 0;

  void validate() const;
  /// λ values used at horizon T for dimension p.
  std::vector<double> lambda_grid(int p, double T) const;
};

/// Aggregate of one (p, η, T) point.
struct CellResult {
  int p = 0;
  double eta = 0.0;
  double horizon = 0.0;
  long long n = 0;
  int total = 0;   // instances that produced a path
  int failed = 0;  // instances lost to unstable draws or numerical failure
  std::vector<double> lambdas;
  std::vector<int> successes;  // per λ
  int best_lambda = 0;
  double best_success = 0.0;  // sup over λ of the success fraction
  double best_se = 0.0;       // binomial standard error at the best λ
  std::optional<double> auc_mean, auc_se;
  std::vector<double> nrmse_mean;  // per λ, when requested
};

struct ComplexityEntry {
  int p = 0;
  double eta = 0.0;
  /// Smallest grid horizon from which best-λ success stays ≥ 1 − δ.
  std::optional<double> horizon;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<CellResult> cells;
  std::vector<ComplexityEntry> complexity;
  bool complete = true;
  std::vector<std::string> errors;

  const CellResult& cell(int p, double eta, double horizon) const;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Runs the sweep. The result is a pure function of the spec (thread count
/// included or not).
SweepResult run_sweep(const SweepSpec& spec, const ProgressFn& progress = {});

/// Eq. (37)-style rule on the best-λ success of each (p, η) curve.
std::vector<ComplexityEntry> empirical_sample_complexity(const SweepResult& result,
                                                         double delta);
/// Same rule on a bare success table ordered by ascending grid point;
/// returns the index of the first qualifying grid point.
std::optional<std::size_t> first_sustained_index(const std::vector<double>& success,
                                                 double delta);

struct RocPoint {
  double lambda = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// ROC of non-zero detection along a λ path. An entry is positive when the
/// truth is non-zero. Points are ordered by decreasing λ, (0,0) and (1,1) are
/// appended and the area is the trapezoid sum over that order.
RocCurve roc_auc(const IntMatrix& truth, const std::vector<IntMatrix>& supports,
                 const std::vector<double>& lambdas);

/// ‖Θ̂ − Θ⁰‖_F / ‖Θ⁰‖_F.
double nrmse(const Matrix& theta_hat, const Matrix& theta0);

double binomial_se(int successes, int total);

/// Flat `key = value` configuration; `#` starts a comment.
SweepSpec parse_sweep_config(const std::string& text);
SweepSpec load_sweep_config(const std::filesystem::path& path);

/// Writes results.json, curve_<p>.csv and complexity.csv (η-suffixed names
/// when the spec has several η).
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

}  // namespace driftrec::harness

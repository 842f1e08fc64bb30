#pragma once

#include "driftrec/basis.hpp"
#include "driftrec/common.hpp"
#include "driftrec/lyapunov.hpp"
#include "driftrec/sim.hpp"

#include <optional>
#include <vector>

namespace driftrec {

/// Sufficient statistics of the per-row quadratic objective
///   L(θ) = ½ θ*Q̂θ − ⟨θ, ĝ⟩ (+ const)
/// with Q̂ = (1/n) Σ F_t F_t* and ĝ = (1/(nη)) Σ F_t (x_r(t+1) − x_r(t)),
/// features taken at the left endpoint of each transition.
struct NormalEquations {
  Matrix Qhat;
  Vector ghat;
  long long n = 0;
  double eta = 0.0;
  int row = 0;
};

/// Streaming accumulation of the normal equations of every output row.
/// Q̂ is shared between rows, so one pass over the path serves all of them.
class NormalAccumulator {
 public:
  NormalAccumulator(const BasisSet& basis, double eta);

  /// Adds the transition x_prev → x_next.
  void push(const Vector& x_prev, const Vector& x_next);
  void push_trajectory(const Trajectory& traj, int transitions = -1);

  long long count() const { return n_; }
  /// Q̂ = (1/n) Σ F F*.
  Matrix qhat() const;
  /// Column r holds ĝ for output row r (m × state_dim).
  Matrix ghat() const;
  NormalEquations equations(int row) const;

 private:
  const BasisSet& basis_;
  double eta_;
  long long n_ = 0;
  Matrix ff_;  // lower triangle of Σ F F*
  Matrix fdx_;
  Vector features_;
};

NormalEquations build_normal_equations(const Trajectory& traj, const BasisSet& basis, int row);

struct RlsConfig {
  double lambda = 0.0;
  double tol = 1e-8;
  int max_iter = 100000;
  /// Coefficients with magnitude at or below this are reported as sign 0.
  /// Unset selects 1e-6·max(1, ‖θ̂_r‖_∞) per row.
  std::optional<double> zero_threshold;

  void validate() const;
};

struct RlsSolution {
  Vector coef;
  int iterations = 0;
  /// Largest violation of the ℓ1 optimality conditions at `coef`.
  double kkt_residual = 0.0;
  bool converged = false;
};

/// min ½θ*Qθ − ⟨θ,g⟩ + λ‖θ‖₁ by cyclic coordinate descent with exact
/// soft-threshold updates. Between full sweeps the active block is finished
/// by feature-sign search (exact solve for fixed signs, line search over sign
/// changes), which copes with ill-conditioned or singular Q.
RlsSolution solve_rls(const Matrix& Q, const Vector& g, const RlsConfig& cfg,
                      const Vector* warm_start = nullptr);
RlsSolution solve_rls(const NormalEquations& ne, const RlsConfig& cfg);

/// Solves along a λ grid (any order), warm-starting from larger λ to smaller.
/// Results are returned in the order of `lambdas`.
std::vector<RlsSolution> solve_rls_path(const Matrix& Q, const Vector& g,
                                        const std::vector<double>& lambdas,
                                        const RlsConfig& cfg);

/// ½θ*Qθ − ⟨θ,g⟩ + λ‖θ‖₁
double rls_objective(const Matrix& Q, const Vector& g, const Vector& theta, double lambda);
double kkt_violation(const Matrix& Q, const Vector& g, const Vector& theta, double lambda);

double soft_threshold(double z, double lambda);

double default_zero_threshold(const Vector& coef);
Eigen::VectorXi sign_pattern(const Vector& coef, double zero_threshold);
Eigen::VectorXi threshold_signs(const Vector& coef, double theta_min);

struct RecoveryResult {
  Matrix theta_hat;
  IntMatrix signed_support;
  std::vector<int> per_row_iters;
  std::vector<double> per_row_kkt_residual;
  std::vector<bool> per_row_converged;
  double lambda_used = 0.0;

  bool all_converged() const;
};

RecoveryResult recover(const Trajectory& traj, const BasisSet& basis, const RlsConfig& cfg);
RecoveryResult recover(const NormalAccumulator& acc, int rows, const RlsConfig& cfg);

/// Unpenalized solve followed by the rule |θ̂| < θ_min/2 → 0, else sign(θ̂).
RecoveryResult threshold_estimator(const Trajectory& traj, const BasisSet& basis,
                                   double theta_min);
Vector least_squares_row(const NormalEquations& ne);

struct Proposition1Report {
  double score_inf = 0.0;          // ‖Ĝ‖_∞
  double score_support_inf = 0.0;  // ‖Ĝ_S‖_∞
  double offsupport_deviation = 0.0;
  double support_deviation = 0.0;
  bool score_bound = false;            // ‖Ĝ‖_∞ ≤ λα/3
  bool support_score_bound = false;    // ‖Ĝ_S‖_∞ ≤ θ_min C_min/(4k) − λ
  bool offsupport_hessian = false;     // |||Q̂_{Sᶜ,S} − Q⁰_{Sᶜ,S}|||_∞ ≤ (α/12)(C_min/√k)
  bool support_hessian = false;        // |||Q̂_{S,S} − Q⁰_{S,S}|||_∞ ≤ (α/12)(C_min/√k)

  bool all() const {
    return score_bound && support_score_bound && offsupport_hessian && support_hessian;
  }
};

/// Evaluates the four sufficient conditions for exact signed-support
/// recovery of one row, given the true row θ⁰_r and its stationary covariance.
/// Ĝ = ĝ − Q̂θ⁰_r is the score at the truth.
Proposition1Report proposition1_check(const NormalEquations& ne, const Vector& theta0_row,
                                      const StationaryCovariance& Q0, double lambda,
                                      double alpha, double c_min, double theta_min, int k);

}  // namespace driftrec

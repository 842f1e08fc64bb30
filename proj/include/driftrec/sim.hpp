#pragma once

#include "driftrec/basis.hpp"
#include "driftrec/common.hpp"
#include "driftrec/lyapunov.hpp"

#include <cstdint>
#include <string>

namespace driftrec {

/// Sampled path: row t of `states` is x(t·eta).
struct Trajectory {
  Matrix states;
  double eta = 0.0;
  std::uint64_t seed = 0;
  std::string model_tag;

  int dim() const { return static_cast<int>(states.cols()); }
  /// Number of transitions (rows − 1).
  int n() const { return static_cast<int>(states.rows()) - 1; }
};

/// L·z with L the lower Cholesky factor of cov and z standard normal.
Vector sample_gaussian(const Matrix& cov, Rng& rng);
Vector sample_stationary_init(const StationaryCovariance& cov, std::uint64_t seed);

/// Euler–Maruyama step x ← x + h·Θx + √h·ξ with ξ standard normal, drawn
/// coordinate by coordinate. The discrete model is the special case h = η.
class LinearStepper {
 public:
  LinearStepper(const Matrix& theta, double step, Vector x0, std::uint64_t seed);

  void advance();
  const Vector& state() const { return x_; }
  long long steps() const { return steps_; }

 private:
  const Matrix& theta_;
  double step_;
  double noise_scale_;
  Vector x_;
  Vector scratch_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  long long steps_ = 0;
};

Trajectory simulate_discrete(const Matrix& theta, double eta, int n, const Vector& x0,
                             std::uint64_t seed);

/// Fine-step Euler–Maruyama at eta_fine, keeping every (eta_sample/eta_fine)-th
/// state up to time T.
Trajectory simulate_continuous(const Matrix& theta, double T, double eta_sample,
                               double eta_fine, const Vector& x0, std::uint64_t seed);

/// Number of fine steps per sample; throws unless eta_sample is an integer
/// multiple of eta_fine.
int subsample_factor(double eta_sample, double eta_fine);

/// Every `factor`-th row of a trajectory.
Trajectory subsample(const Trajectory& traj, int factor);

// --- mass-spring network -----------------------------------------------------

struct MassSpringParams {
  Matrix adjacency;     // C⁰, symmetric 0/1, zero diagonal
  Matrix rest_lengths;  // D⁰, symmetric, ≥ 0 on edges
  double gamma = 0.1;
  double sigma = 0.5;
  int dim = 2;
  /// Treat a coincident connected pair as exerting zero force instead of failing.
  bool zero_force = false;

  int masses() const { return static_cast<int>(adjacency.rows()); }
  void validate() const;
};

/// Unit rest lengths on the edges of `adjacency`.
MassSpringParams make_mass_spring(const Matrix& adjacency, int dim, double gamma,
                                  double sigma);

/// U(q) = ½ Σ_{i<j} C_ij (‖q_i − q_j‖ − D_ij)².
double spring_potential(const MassSpringParams& params, const Vector& q);
/// ½‖v‖² + U(q) for a state [q, v].
double mechanical_energy(const MassSpringParams& params, const Vector& state);

/// Semi-implicit Euler: v ← v + dt(−γv − ∇U(q)) + σ√dt·ξ, then q ← q + dt·v.
class MassSpringStepper {
 public:
  MassSpringStepper(const MassSpringParams& params, double dt, Vector state,
                    std::uint64_t seed);
  void advance();
  const Vector& state() const { return x_; }

 private:
  const MassSpringParams& params_;
  double dt_;
  Vector x_;
  Vector grad_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  long long steps_ = 0;
};

Trajectory simulate_mass_spring(const MassSpringParams& params, double dt, double T,
                                const Vector& q0, const Vector& v0, std::uint64_t seed);

/// Drift coefficients of the mass-spring system in the mass-spring basis
/// (rows: state coordinates [q, v]; columns: basis features).
Matrix mass_spring_coefficients(const MassSpringParams& params);

/// Random initial positions: i.i.d. N(0, spread²) per coordinate.
Vector random_positions(int masses, int dim, double spread, Rng& rng);

// --- generic drift linear in a basis ------------------------------------------

/// x ← x + dt·Θ·F(x) + σ√dt·ξ.
class BasisDriftStepper {
 public:
  BasisDriftStepper(const Matrix& theta, const BasisSet& basis, double dt, double sigma,
                    Vector x0, std::uint64_t seed);
  void advance();
  const Vector& state() const { return x_; }

 private:
  const Matrix& theta_;
  const BasisSet& basis_;
  double dt_;
  double noise_scale_;
  Vector x_;
  Vector features_;
  Rng rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  long long steps_ = 0;
};

Trajectory simulate_basis_drift(const Matrix& theta, const BasisSet& basis, double dt,
                                int n, const Vector& x0, double sigma, std::uint64_t seed);

// --- biochemical pathway ------------------------------------------------------

/// Mass-action rates of the nine-species receptor/kinase/substrate pathway
///   R + L ⇌ LR*,  LR* + K ⇌ LR*K,  LR*K → LR* + K*,
///   K* + S ⇌ K*S,  K*S → K* + S*
/// with state x = (R, L, LR*, LR*K, K, K*, S, K*S, S*), plus first-order
/// turnover −decay·x_i and constant influx so that the noisy system is
/// confined near a positive equilibrium.
struct PathwayParams {
  double kf1 = 1.0, kr1 = 1.0;
  double kf2 = 1.0, kr2 = 1.0;
  double kf3 = 1.0;
  double kf4 = 1.0, kr4 = 1.0;
  double kf5 = 1.0;
  double decay = 1.0;
  Vector influx = Vector::Constant(9, 1.0);
  double sigma = 1.0;
};

/// 9×46 coefficient matrix over monomial_basis_deg2(9).
Matrix pathway_coefficients(const PathwayParams& params);

}  // namespace driftrec

#pragma once

#include "driftrec/common.hpp"

#include <optional>
#include <vector>

namespace driftrec {

enum class Model { continuous, discrete };

/// Stationary covariance Q⁰ of the continuous model (ΘQ + QΘ* + I = 0) or of
/// the discrete model with step eta (ΘQ + QΘ* + ηΘQΘ* + I = 0).
struct StationaryCovariance {
  Matrix Q;
  Model model = Model::continuous;
  double eta = 0.0;
  /// Frobenius norm of the defining equation's residual at Q.
  double residual_norm = 0.0;
};

enum class LyapunovMethod {
  schur,      // complex Schur reduction, O(p³)
  kronecker,  // dense vectorized system, O(p⁶); reference only
};

StationaryCovariance solve_continuous(const Matrix& theta,
                                      LyapunovMethod method = LyapunovMethod::schur);

/// Solves the equivalent Stein equation AQA* − Q + ηI = 0, A = I + ηΘ.
/// Requires spectral radius of A below one.
StationaryCovariance solve_discrete(const Matrix& theta, double eta,
                                    LyapunovMethod method = LyapunovMethod::schur);

double continuous_residual(const Matrix& theta, const Matrix& Q);
double discrete_residual(const Matrix& theta, const Matrix& Q, double eta);

/// Per-row restricted-convexity / irrepresentability diagnostics.
struct AssumptionReport {
  int row = 0;
  std::vector<int> support;
  /// λ_min(Q_{S,S}); NaN when the support is empty.
  double c_min = 0.0;
  /// 1 − |||Q_{Sᶜ,S} Q_{S,S}⁻¹|||_∞. May be negative when the assumption fails.
  double alpha = 1.0;
  double rho_min = 0.0;
  /// (1 − σ_max(I + ηΘ))/η; present only for the discrete model.
  std::optional<double> d;
  double theta_min_observed = 0.0;
  int k_observed = 0;
  bool degenerate = false;
};

/// Support of a row: entries with |θ| > tol.
std::vector<int> row_support(const Matrix& theta, int row, double tol = 0.0);

/// |||Q_{Sᶜ,S} (Q_{S,S})⁻¹|||_∞.
double incoherence(const Matrix& Q, const std::vector<int>& support);

AssumptionReport assumption_report(const Matrix& theta, const StationaryCovariance& cov,
                                   int row, std::optional<double> eta = std::nullopt,
                                   double support_tol = 0.0);

}  // namespace driftrec

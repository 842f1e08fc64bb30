#pragma once

#include "driftrec/common.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace driftrec::bounds {

/// Value of one sample-complexity bound (observation time, or n·η for the
/// discrete model) together with the inputs it was evaluated at.
struct BoundReport {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> inputs;
  /// Regularization rule λ(T) attached to upper bounds.
  std::function<double(double)> lambda_at;
  /// Lower bounds carry an unspecified absolute constant (caller-supplied, default 1).
  bool up_to_constant = false;
  /// Non-positive lower bound: carries no information.
  bool vacuous = false;
};

/// Continuous-time sparse upper bound:
///   2·10⁴ k²(kρ⁻² + θ⁻²)/(α²ρC²) · log(4pk/δ),  λ(T) = √(36 log(4p/δ)/(Tα²ρ)).
BoundReport ub_sparse_continuous(int k, double rho_min, double theta_min, double alpha,
                                 double c_min, int p, double delta);

/// Discrete-time bound on n·η:
///   10⁴ k²(kD⁻² + θ⁻²)/(α²DC²) · log(4pk/δ),  λ(nη) = √(36 log(4p/δ)/(Dα²nη)).
BoundReport ub_discrete(int k, double d, double theta_min, double alpha, double c_min, int p,
                        double delta);

/// Laplacian upper bound 4·10⁵ k²((k+m)/m)⁵(k+m²) log(4pk/δ),
/// λ(T) = √(36(k+m)² log(4p/δ)/(T m³)).
BoundReport ub_laplacian(int k, double m, int p, double delta);

/// C·max{ρ/θ², 1/θ}·log p.
BoundReport lb_sparse(int k, double rho_min, double theta_min, int p, double c = 1.0);
/// C·max{ρ/θ², 1/θ}·p.
BoundReport lb_dense(double rho_min, double theta_min, int p, double c = 1.0);
/// (k log(p/k) − log(B/L)) / (C + 2k²D²B).
BoundReport lb_nonlinear(int k, int p, double b, double l, double d, double c = 0.0);

/// Generic linear-SDE lower bound
///   T ≥ (H − log|M| − 2I − 2) / denominator
/// with the entropy H, alphabet size log|M| and mutual information I supplied
/// by the caller.
BoundReport lb_generic(double entropy, double log_alphabet, double mutual_information,
                       double denominator);

/// Monte-Carlo estimate of the per-dimension Jensen-gap denominator
///   (1/2)·Tr{E[−Θ] − (E[−Θ⁻¹])⁻¹}/p
/// for a sampler of symmetric stable matrices.
struct DenominatorEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  int samples = 0;
};

using MatrixSampler = std::function<Matrix(std::uint64_t seed)>;

DenominatorEstimate lb_generic_denominator_mc(const MatrixSampler& sampler, int p,
                                              int num_samples, std::uint64_t seed);

/// Mean and standard error of Tr{(−Θ)⁻¹}/p over sampled matrices.
DenominatorEstimate mean_inverse_trace_mc(const MatrixSampler& sampler, int p,
                                          int num_samples, std::uint64_t seed);

/// Kesten–McKay density (k/2π)·√(4(k−1)−ν²)/(k²−ν²) on |ν| ≤ 2√(k−1).
double kesten_mckay_density(int k, double nu);

/// G(k,z) = ∫ dμ(ν)/(z − ν) for the Kesten–McKay law, closed form, evaluated
/// as 2(k−1)/((k−2)z + k√(z² − 4k + 4)) (algebraically equal to
/// −((k−2)z − k√(z²−4k+4))/(2(z²−k²)) and regular at z = k).
double kesten_mckay_G(int k, double z);

/// Same integral by adaptive Gauss–Kronrod quadrature of the density.
double kesten_mckay_G_numeric(int k, double z, double tol = 1e-12);

/// ρ + 2θ√(k−1) − θ/G(k, ρ/θ + 2√(k−1)).
double denominator_sparse(double theta_min, int k, double rho);

/// C(α,ρ) = (−√(ρ(4√α+ρ)) + 2√α + ρ)/(2α).
double wigner_C(double alpha, double rho);

/// ρ + 2√α − 1/C(α,ρ) with α = θ²/2.
double denominator_dense(double theta_min, double rho);

double lambda_theorem1(double T, double alpha, double rho_min, int p, double delta);
double lambda_theorem4(double n_eta, double d, double alpha, int p, double delta);
double lambda_laplacian(double T, int k, double m, int p, double delta);

}  // namespace driftrec::bounds

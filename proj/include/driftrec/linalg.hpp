#pragma once

#include "driftrec/common.hpp"

#include <vector>

namespace driftrec::linalg {

/// λ_min(−(Θ+Θ*)/2). Positive iff the symmetric part of Θ is negative definite.
double rho_min(const Matrix& theta);

/// Largest eigenvalue of a symmetric matrix.
double sym_max_eigenvalue(const Matrix& sym);
double sym_min_eigenvalue(const Matrix& sym);

/// Largest real part over the spectrum of a general square matrix.
double spectral_abscissa(const Matrix& a);
double spectral_radius(const Matrix& a);
double sigma_max(const Matrix& a);

/// ℓ∞ operator norm: maximum absolute row sum.
double inf_norm(const Matrix& a);

Matrix submatrix(const Matrix& a, const std::vector<int>& rows,
                 const std::vector<int>& cols);
Vector subvector(const Vector& v, const std::vector<int>& idx);
std::vector<int> complement(const std::vector<int>& idx, int n);

double relative_frobenius(const Matrix& a, const Matrix& reference);

}  // namespace driftrec::linalg

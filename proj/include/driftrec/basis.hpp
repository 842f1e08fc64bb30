#pragma once

#include "driftrec/common.hpp"

#include <span>
#include <string>
#include <vector>

namespace driftrec {

enum class BasisKind { linear, monomial2, mass_spring };

std::string to_string(BasisKind kind);
BasisKind parse_basis_kind(const std::string& name);

/// Ordered family of feature maps F(x) = [f₁(x), …, f_m(x)] parametrizing the
/// drift as Θ·F(x).
///
/// Feature orderings (column indices of Θ depend on them):
///   linear      x1..xp
///   monomial2   1, x1..xp, then x_i·x_j for i<j in row-major (i, j) order
///   mass-spring with state [q, v], q_i, v_i ∈ R^d:
///               v_i[a]                  for i, then a
///               Δ_ij[a] = q_i[a]−q_j[a] for i<j (row-major), then a
///               Δ_ij[a]/‖Δ_ij‖          same order; zero when ‖Δ_ij‖ = 0
class BasisSet {
 public:
  static BasisSet linear(int p);
  static BasisSet monomial_deg2(int p);
  static BasisSet mass_spring(int p, int d);

  BasisKind kind() const { return kind_; }
  /// Length of the state vector the basis is evaluated on.
  int input_dim() const { return input_dim_; }
  /// Number of features m.
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  void eval(std::span<const double> x, std::span<double> out) const;
  Vector eval(const Vector& x) const;

  /// Rows 0..rows−1 of `states` mapped through the basis (rows × m).
  Matrix design_matrix(const Matrix& states, int rows) const;

  /// Index of the feature pair (i<j) in the row-major enumeration.
  static int pair_index(int i, int j, int p);

  int nodes() const { return nodes_; }
  int spatial_dim() const { return dim_; }

 private:
  BasisSet(BasisKind kind, int input_dim, int nodes, int dim);

  BasisKind kind_;
  int input_dim_;
  int nodes_;
  int dim_;
  std::vector<std::string> names_;
};

BasisSet linear_basis(int p);
BasisSet monomial_basis_deg2(int p);
BasisSet mass_spring_basis(int p, int d);

/// Builds the basis named by `kind`. `p` is the number of variables for
/// linear/monomial2 and the number of masses for mass-spring.
BasisSet make_basis(BasisKind kind, int p, int d = 1);

}  // namespace driftrec

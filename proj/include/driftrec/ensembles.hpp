#pragma once

#include "driftrec/common.hpp"

#include <cstdint>
#include <string>

namespace driftrec {

enum class EnsembleKind {
  sparse_shift,
  dense,
  dense_symmetric,
  signed_regular,
  laplacian,
  custom,
};

std::string to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(const std::string& name);

/// A drift coefficient Θ⁰ together with the ensemble that produced it.
struct DriftMatrix {
  Matrix entries;
  EnsembleKind kind = EnsembleKind::custom;
  double theta_min = 0.0;
  std::uint64_t seed = 0;

  int p() const { return static_cast<int>(entries.rows()); }
};

enum class GraphMode { uniform_regular, bounded_degree_bernoulli };

struct GraphSpec {
  int p = 0;
  int k = 0;
  GraphMode mode = GraphMode::uniform_regular;
  std::uint64_t seed = 0;
  /// Edge probability for bounded-degree-bernoulli; negative selects k/(p-1).
  double edge_prob = -1.0;
  bool require_connected = false;
  int max_attempts = 10000;
};

/// Number of regenerations tried before a random ensemble gives up on
/// producing a matrix with λ_min(−(Θ+Θ*)/2) > 0.
inline constexpr int kDefaultStabilityRetries = 100;

/// −shift·I + Θ̃ with Θ̃ i.i.d. Bernoulli(k/p) on every entry (diagonal included).
DriftMatrix gen_sparse_shift(int p, int k, double shift, std::uint64_t seed,
                             int retries = kDefaultStabilityRetries);

/// Law of the non-zero entries of the dense ensemble before the p^{-1/2} scaling.
enum class EntryLaw {
  gaussian,    // standard normal
  rademacher,  // ±1, so every non-zero entry has magnitude p^{-1/2}
};

/// −(rho+√2)·I + p^{-1/2}·Θ̃, where Θ̃ has i.i.d. entries from `law`, each
/// zeroed with probability 1/2.
DriftMatrix gen_dense(int p, double rho, std::uint64_t seed,
                      EntryLaw law = EntryLaw::gaussian,
                      int retries = kDefaultStabilityRetries);

/// How the diagonal shift γ of the symmetric random constructions is chosen.
enum class ShiftRule {
  exact,       // smallest γ ≥ 0 with λ_max(Θ) ≤ −rho on the drawn instance
  asymptotic,  // γ = rho, the large-p value of the exact rule
};

/// Symmetric dense construction: zero diagonal, off-diagonal pairs ±theta_min
/// with probability 1/4 each and 0 with probability 1/2;
/// Θ = −(γ + 2√a)·I + Θ̃/√p with a = theta_min²/2.
DriftMatrix gen_dense_symmetric(int p, double theta_min, double rho,
                                std::uint64_t seed,
                                ShiftRule rule = ShiftRule::exact);

/// Signed adjacency of a uniformly random simple k-regular graph scaled by
/// theta_min, shifted so that λ_max(Θ) ≤ −rho.
DriftMatrix gen_signed_regular(int p, int k, double theta_min, double rho,
                               std::uint64_t seed);

/// 0/1 symmetric adjacency matrix with zero diagonal.
Matrix gen_graph(const GraphSpec& spec);

/// −m·I + Δ^G for the given adjacency.
DriftMatrix gen_laplacian(const Matrix& adjacency, double m);
DriftMatrix gen_laplacian(const GraphSpec& graph, double m);

/// Connected-component test on a 0/1 adjacency.
bool is_connected(const Matrix& adjacency);

}  // namespace driftrec

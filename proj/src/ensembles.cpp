#include "driftrec/ensembles.hpp"

#include "driftrec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace driftrec {

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::sparse_shift: return "sparse-shift";
    case EnsembleKind::dense: return "dense";
    case EnsembleKind::dense_symmetric: return "dense-symmetric";
    case EnsembleKind::signed_regular: return "signed-regular";
    case EnsembleKind::laplacian: return "laplacian";
    case EnsembleKind::custom: return "custom";
  }
  return "custom";
}

EnsembleKind parse_ensemble_kind(const std::string& name) {
  for (auto kind : {EnsembleKind::sparse_shift, EnsembleKind::dense,
                    EnsembleKind::dense_symmetric, EnsembleKind::signed_regular,
                    EnsembleKind::laplacian, EnsembleKind::custom}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown ensemble '" + name + "'");
}

namespace {

// Retries `draw(attempt_seed)` until the result is strictly stable.
template <typename Draw>
DriftMatrix draw_stable(std::uint64_t seed, int retries, const char* what, Draw draw) {
  require(retries >= 1, "retry budget must be positive");
  for (int attempt = 0; attempt < retries; ++attempt) {
    DriftMatrix out = draw(attempt == 0 ? seed : mix_seed(seed, attempt));
    out.seed = seed;
    if (linalg::rho_min(out.entries) > 0.0) return out;
  }
  throw NumericalError(std::string(what) + ": no stable draw within " +
                       std::to_string(retries) + " attempts");
}

bool try_configuration_model(int p, int k, Rng& rng, Matrix& adj) {
  std::vector<int> stubs(static_cast<std::size_t>(p) * k);
  for (int i = 0; i < p; ++i)
    std::fill_n(stubs.begin() + static_cast<std::ptrdiff_t>(i) * k, k, i);
  std::shuffle(stubs.begin(), stubs.end(), rng);
  adj.setZero(p, p);
  for (std::size_t e = 0; e < stubs.size(); e += 2) {
    const int a = stubs[e];
    const int b = stubs[e + 1];
    if (a == b || adj(a, b) != 0.0) return false;
    adj(a, b) = adj(b, a) = 1.0;
  }
  return true;
}

bool try_bernoulli_graph(int p, int k, double q, Rng& rng, Matrix& adj) {
  std::bernoulli_distribution edge(q);
  adj.setZero(p, p);
  std::vector<int> degree(p, 0);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (edge(rng)) {
        adj(i, j) = adj(j, i) = 1.0;
        ++degree[i];
        ++degree[j];
      }
    }
  }
  return *std::max_element(degree.begin(), degree.end()) <= k;
}

}  // namespace

DriftMatrix gen_sparse_shift(int p, int k, double shift, std::uint64_t seed, int retries) {
  require(p >= 1, "gen_sparse_shift: p must be >= 1");
  require(k > 0 && k <= p, "gen_sparse_shift: need 0 < k <= p");
  require(shift > 0.0, "gen_sparse_shift: shift must be positive");
  return draw_stable(seed, retries, "gen_sparse_shift", [&](std::uint64_t s) {
    Rng rng = make_rng(s);
    std::bernoulli_distribution bern(static_cast<double>(k) / p);
    DriftMatrix out;
    out.entries.resize(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) out.entries(i, j) = bern(rng) ? 1.0 : 0.0;
    out.entries.diagonal().array() -= shift;
    out.kind = EnsembleKind::sparse_shift;
    out.theta_min = 1.0;
    return out;
  });
}

DriftMatrix gen_dense(int p, double rho, std::uint64_t seed, EntryLaw law, int retries) {
  require(p >= 1, "gen_dense: p must be >= 1");
  require(rho > 0.0, "gen_dense: rho must be positive");
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  return draw_stable(seed, retries, "gen_dense", [&](std::uint64_t s) {
    Rng rng = make_rng(s);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::bernoulli_distribution keep(0.5);
    std::bernoulli_distribution positive(0.5);
    DriftMatrix out;
    out.entries.resize(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        const double value =
            law == EntryLaw::gaussian ? gauss(rng) : (positive(rng) ? 1.0 : -1.0);
        out.entries(i, j) = keep(rng) ? value * scale : 0.0;
      }
    }
    out.entries.diagonal().array() -= rho + std::sqrt(2.0);
    out.kind = EnsembleKind::dense;
    out.theta_min = law == EntryLaw::rademacher ? scale : 0.0;
    return out;
  });
}

DriftMatrix gen_dense_symmetric(int p, double theta_min, double rho, std::uint64_t seed,
                                ShiftRule rule) {
  require(p >= 1, "gen_dense_symmetric: p must be >= 1");
  require(theta_min > 0.0 && rho > 0.0,
          "gen_dense_symmetric: theta_min and rho must be positive");
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> quarter(0, 3);
  Matrix base = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const int draw = quarter(rng);
      const double value = draw == 0 ? theta_min : (draw == 1 ? -theta_min : 0.0);
      base(i, j) = base(j, i) = value;
    }
  }
  base /= std::sqrt(static_cast<double>(p));
  const double edge = 2.0 * std::sqrt(theta_min * theta_min / 2.0);
  double gamma = rho;
  if (rule == ShiftRule::exact) {
    gamma = std::max(0.0, rho + linalg::sym_max_eigenvalue(base) - edge);
  }
  DriftMatrix out;
  out.entries = base;
  out.entries.diagonal().array() -= gamma + edge;
  out.kind = EnsembleKind::dense_symmetric;
  out.theta_min = theta_min;
  out.seed = seed;
  return out;
}

DriftMatrix gen_signed_regular(int p, int k, double theta_min, double rho,
                               std::uint64_t seed) {
  require((static_cast<long long>(p) * k) % 2 == 0, "gen_signed_regular: p*k must be even");
  require(k >= 3 && k < p, "gen_signed_regular: need 3 <= k < p");
  require(theta_min > 0.0 && rho > 0.0,
          "gen_signed_regular: theta_min and rho must be positive");
  GraphSpec spec;
  spec.p = p;
  spec.k = k;
  spec.mode = GraphMode::uniform_regular;
  spec.seed = mix_seed(seed, 0x67726170ULL);
  Matrix signed_adj = gen_graph(spec);
  Rng rng = make_rng(mix_seed(seed, 0x7369676eULL));
  std::bernoulli_distribution flip(0.5);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (signed_adj(i, j) != 0.0 && flip(rng)) {
        signed_adj(i, j) = signed_adj(j, i) = -1.0;
      }
    }
  }
  const double edge = 2.0 * theta_min * std::sqrt(static_cast<double>(k - 1));
  const double gamma =
      std::max(0.0, rho + theta_min * linalg::sym_max_eigenvalue(signed_adj) - edge);
  DriftMatrix out;
  out.entries = theta_min * signed_adj;
  out.entries.diagonal().array() -= gamma + edge;
  out.kind = EnsembleKind::signed_regular;
  out.theta_min = theta_min;
  out.seed = seed;
  return out;
}

bool is_connected(const Matrix& adjacency) {
  const int p = static_cast<int>(adjacency.rows());
  if (p == 0) return true;
  std::vector<char> seen(p, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u = 0; u < p; ++u) {
      if (adjacency(v, u) != 0.0 && !seen[u]) {
        seen[u] = 1;
        ++visited;
        stack.push_back(u);
      }
    }
  }
  return visited == p;
}

Matrix gen_graph(const GraphSpec& spec) {
  require(spec.p >= 1, "gen_graph: p must be >= 1");
  require(spec.k >= 0 && spec.k < spec.p,
          "gen_graph: need 0 <= k < p");
  require(spec.max_attempts >= 1, "gen_graph: max_attempts must be positive");
  if (spec.mode == GraphMode::uniform_regular) {
    require((static_cast<long long>(spec.p) * spec.k) % 2 == 0,
            "gen_graph: p*k must be even for a k-regular graph");
  }
  double q = spec.edge_prob;
  if (q < 0.0) q = spec.p > 1 ? static_cast<double>(spec.k) / (spec.p - 1) : 0.0;
  require(q <= 1.0, "gen_graph: edge probability must be <= 1");

  Rng rng = make_rng(spec.seed);
  Matrix adj;
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    const bool ok = spec.mode == GraphMode::uniform_regular
                        ? try_configuration_model(spec.p, spec.k, rng, adj)
                        : try_bernoulli_graph(spec.p, spec.k, q, rng, adj);
    if (ok && (!spec.require_connected || is_connected(adj))) return adj;
  }
  throw NumericalError("gen_graph: rejection budget of " +
                       std::to_string(spec.max_attempts) + " attempts exhausted");
}

DriftMatrix gen_laplacian(const Matrix& adjacency, double m) {
  require(m > 0.0, "gen_laplacian: m must be positive");
  require(adjacency.rows() == adjacency.cols(), "gen_laplacian: adjacency must be square");
  const int p = static_cast<int>(adjacency.rows());
  for (int i = 0; i < p; ++i) {
    require(adjacency(i, i) == 0.0, "gen_laplacian: adjacency must have zero diagonal");
    for (int j = 0; j < p; ++j) {
      const double a = adjacency(i, j);
      require(a == adjacency(j, i) && (a == 0.0 || a == 1.0),
              "gen_laplacian: adjacency must be symmetric 0/1");
    }
  }
  DriftMatrix out;
  out.entries = adjacency;
  const Vector degree = adjacency.rowwise().sum();
  out.entries.diagonal() = -(degree.array() + m);
  out.kind = EnsembleKind::laplacian;
  out.theta_min = 1.0;
  return out;
}

DriftMatrix gen_laplacian(const GraphSpec& graph, double m) {
  DriftMatrix out = gen_laplacian(gen_graph(graph), m);
  out.seed = graph.seed;
  return out;
}

}  // namespace driftrec

#include "driftrec/basis.hpp"

#include <cmath>

namespace driftrec {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::linear: return "linear";
    case BasisKind::monomial2: return "monomial2";
    case BasisKind::mass_spring: return "mass-spring";
  }
  return "linear";
}

BasisKind parse_basis_kind(const std::string& name) {
  if (name == "linear") return BasisKind::linear;
  if (name == "monomial2") return BasisKind::monomial2;
  if (name == "mass-spring") return BasisKind::mass_spring;
  throw InvalidArgument("unknown basis '" + name + "'");
}

BasisSet::BasisSet(BasisKind kind, int input_dim, int nodes, int dim)
    : kind_(kind), input_dim_(input_dim), nodes_(nodes), dim_(dim) {}

int BasisSet::pair_index(int i, int j, int p) {
  // Pairs (0,1),(0,2),…,(0,p−1),(1,2),… ; i < j.
  return i * p - i * (i + 1) / 2 + (j - i - 1);
}

BasisSet BasisSet::linear(int p) {
  require(p >= 1, "linear_basis: p must be >= 1");
  BasisSet b(BasisKind::linear, p, p, 1);
  for (int i = 1; i <= p; ++i) b.names_.push_back("x" + std::to_string(i));
  return b;
}

BasisSet BasisSet::monomial_deg2(int p) {
  require(p >= 1, "monomial_basis_deg2: p must be >= 1");
  BasisSet b(BasisKind::monomial2, p, p, 1);
  b.names_.push_back("1");
  for (int i = 1; i <= p; ++i) b.names_.push_back("x" + std::to_string(i));
  for (int i = 1; i <= p; ++i)
    for (int j = i + 1; j <= p; ++j)
      b.names_.push_back("x" + std::to_string(i) + "*x" + std::to_string(j));
  return b;
}

BasisSet BasisSet::mass_spring(int p, int d) {
  require(p >= 2 && d >= 1, "mass_spring_basis: need p >= 2 masses and d >= 1");
  BasisSet b(BasisKind::mass_spring, 2 * p * d, p, d);
  const auto coord = [d](int a) { return d == 1 ? std::string() : "[" + std::to_string(a) + "]"; };
  for (int i = 1; i <= p; ++i)
    for (int a = 0; a < d; ++a) b.names_.push_back("v" + std::to_string(i) + coord(a));
  for (const char* prefix : {"D", "U"}) {
    for (int i = 1; i <= p; ++i)
      for (int j = i + 1; j <= p; ++j)
        for (int a = 0; a < d; ++a)
          b.names_.push_back(std::string(prefix) + std::to_string(i) + "_" +
                             std::to_string(j) + coord(a));
  }
  return b;
}

void BasisSet::eval(std::span<const double> x, std::span<double> out) const {
  require(static_cast<int>(x.size()) == input_dim_, "BasisSet::eval: wrong input length");
  require(static_cast<int>(out.size()) == size(), "BasisSet::eval: wrong output length");
  switch (kind_) {
    case BasisKind::linear:
      for (int i = 0; i < input_dim_; ++i) out[i] = x[i];
      return;
    case BasisKind::monomial2: {
      const int p = input_dim_;
      std::size_t c = 0;
      out[c++] = 1.0;
      for (int i = 0; i < p; ++i) out[c++] = x[i];
      for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) out[c++] = x[i] * x[j];
      return;
    }
    case BasisKind::mass_spring: {
      const int p = nodes_;
      const int d = dim_;
      const int pd = p * d;
      const int pairs = p * (p - 1) / 2;
      const double* q = x.data();
      const double* v = x.data() + pd;
      for (int i = 0; i < pd; ++i) out[i] = v[i];
      double* delta = out.data() + pd;
      double* unit = delta + static_cast<std::ptrdiff_t>(pairs) * d;
      std::size_t c = 0;
      for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
          double norm2 = 0.0;
          for (int a = 0; a < d; ++a) {
            const double diff = q[i * d + a] - q[j * d + a];
            delta[c + a] = diff;
            norm2 += diff * diff;
          }
          const double norm = std::sqrt(norm2);
          for (int a = 0; a < d; ++a) unit[c + a] = norm > 0.0 ? delta[c + a] / norm : 0.0;
          c += d;
        }
      }
      return;
    }
  }
}

Vector BasisSet::eval(const Vector& x) const {
  Vector out(size());
  eval(std::span<const double>(x.data(), x.size()), std::span<double>(out.data(), out.size()));
  return out;
}

Matrix BasisSet::design_matrix(const Matrix& states, int rows) const {
  require(states.cols() == input_dim_, "design_matrix: state dimension mismatch");
  require(rows >= 0 && rows <= states.rows(), "design_matrix: row count out of range");
  Matrix design(rows, size());
  Vector x(input_dim_);
  Vector f(size());
  for (int t = 0; t < rows; ++t) {
    x = states.row(t).transpose();
    eval(std::span<const double>(x.data(), x.size()), std::span<double>(f.data(), f.size()));
    design.row(t) = f.transpose();
  }
  return design;
}

BasisSet linear_basis(int p) { return BasisSet::linear(p); }
BasisSet monomial_basis_deg2(int p) { return BasisSet::monomial_deg2(p); }
BasisSet mass_spring_basis(int p, int d) { return BasisSet::mass_spring(p, d); }

BasisSet make_basis(BasisKind kind, int p, int d) {
  switch (kind) {
    case BasisKind::linear: return linear_basis(p);
    case BasisKind::monomial2: return monomial_basis_deg2(p);
    case BasisKind::mass_spring: return mass_spring_basis(p, d);
  }
  return linear_basis(p);
}

}  // namespace driftrec

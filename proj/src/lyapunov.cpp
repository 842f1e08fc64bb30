#include "driftrec/lyapunov.hpp"

#include "driftrec/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <limits>

namespace driftrec {

namespace {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

void require_square(const Matrix& theta, const char* what) {
  require(theta.rows() == theta.cols() && theta.rows() > 0,
          std::string(what) + ": drift matrix must be square and non-empty");
}

Matrix symmetrize(const Matrix& q) { return (q + q.transpose()) / 2.0; }

// Solves T Y + Y T* = rhs for upper-triangular T, column by column from the right.
CMatrix triangular_lyapunov(const CMatrix& t, const CMatrix& rhs) {
  const Eigen::Index p = t.rows();
  CMatrix y = CMatrix::Zero(p, p);
  for (Eigen::Index j = p - 1; j >= 0; --j) {
    CVector r = CVector::Zero(p);
    for (Eigen::Index m = j + 1; m < p; ++m) r += y.col(m) * std::conj(t(j, m));
    CMatrix shifted = t;
    shifted.diagonal().array() += std::conj(t(j, j));
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs.col(j) - r);
  }
  return y;
}

// Solves S Y S* − Y = rhs for upper-triangular S.
CMatrix triangular_stein(const CMatrix& s, const CMatrix& rhs) {
  const Eigen::Index p = s.rows();
  CMatrix y = CMatrix::Zero(p, p);
  for (Eigen::Index j = p - 1; j >= 0; --j) {
    CVector r = CVector::Zero(p);
    for (Eigen::Index m = j + 1; m < p; ++m) r += y.col(m) * std::conj(s(j, m));
    CMatrix lhs = std::conj(s(j, j)) * s;
    lhs.diagonal().array() -= 1.0;
    y.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs.col(j) - s * r);
  }
  return y;
}

Matrix kronecker_solve(const Matrix& system, const Matrix& rhs_matrix, const char* what) {
  const Eigen::Index p = rhs_matrix.rows();
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw NumericalError(std::string(what) + ": singular Kronecker system");
  const Vector rhs = Eigen::Map<const Vector>(rhs_matrix.data(), p * p);
  const Vector vec_q = lu.solve(rhs);
  return Eigen::Map<const Matrix>(vec_q.data(), p, p);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

double continuous_residual(const Matrix& theta, const Matrix& Q) {
  return (theta * Q + Q * theta.transpose() + Matrix::Identity(Q.rows(), Q.cols())).norm();
}

double discrete_residual(const Matrix& theta, const Matrix& Q, double eta) {
  return (theta * Q + Q * theta.transpose() + eta * theta * Q * theta.transpose() +
          Matrix::Identity(Q.rows(), Q.cols()))
      .norm();
}

StationaryCovariance solve_continuous(const Matrix& theta, LyapunovMethod method) {
  require_square(theta, "solve_continuous");
  const Eigen::Index p = theta.rows();
  Matrix q;
  if (method == LyapunovMethod::kronecker) {
    if (linalg::spectral_abscissa(theta) >= 0.0)
      throw NumericalError("solve_continuous: drift has an eigenvalue with non-negative real part");
    const Matrix id = Matrix::Identity(p, p);
    q = kronecker_solve(kron(id, theta) + kron(theta, id), -id, "solve_continuous");
  } else {
    Eigen::ComplexSchur<CMatrix> schur(theta.cast<Complex>());
    const CMatrix& t = schur.matrixT();
    const CMatrix& u = schur.matrixU();
    if (t.diagonal().real().maxCoeff() >= 0.0)
      throw NumericalError("solve_continuous: drift has an eigenvalue with non-negative real part");
    const CMatrix y = triangular_lyapunov(t, -CMatrix::Identity(p, p));
    q = (u * y * u.adjoint()).real();
  }
  StationaryCovariance out;
  out.Q = symmetrize(q);
  out.model = Model::continuous;
  out.residual_norm = continuous_residual(theta, out.Q);
  if (!out.Q.allFinite()) throw NumericalError("solve_continuous: non-finite solution");
  return out;
}

StationaryCovariance solve_discrete(const Matrix& theta, double eta, LyapunovMethod method) {
  require_square(theta, "solve_discrete");
  require(eta > 0.0, "solve_discrete: eta must be positive");
  const Eigen::Index p = theta.rows();
  const Matrix id = Matrix::Identity(p, p);
  const Matrix a = id + eta * theta;
  Matrix q;
  if (method == LyapunovMethod::kronecker) {
    if (linalg::spectral_radius(a) >= 1.0)
      throw NumericalError("solve_discrete: spectral radius of I + eta*theta is >= 1");
    q = kronecker_solve(kron(a, a) - kron(id, id), -eta * id, "solve_discrete");
  } else {
    Eigen::ComplexSchur<CMatrix> schur(a.cast<Complex>());
    const CMatrix& s = schur.matrixT();
    const CMatrix& u = schur.matrixU();
    if (s.diagonal().cwiseAbs().maxCoeff() >= 1.0)
      throw NumericalError("solve_discrete: spectral radius of I + eta*theta is >= 1");
    const CMatrix y = triangular_stein(s, -eta * CMatrix::Identity(p, p));
    q = (u * y * u.adjoint()).real();
  }
  StationaryCovariance out;
  out.Q = symmetrize(q);
  out.model = Model::discrete;
  out.eta = eta;
  out.residual_norm = discrete_residual(theta, out.Q, eta);
  if (!out.Q.allFinite()) throw NumericalError("solve_discrete: non-finite solution");
  return out;
}

std::vector<int> row_support(const Matrix& theta, int row, double tol) {
  std::vector<int> support;
  for (Eigen::Index j = 0; j < theta.cols(); ++j)
    if (std::abs(theta(row, j)) > tol) support.push_back(static_cast<int>(j));
  return support;
}

double incoherence(const Matrix& Q, const std::vector<int>& support) {
  const int p = static_cast<int>(Q.rows());
  if (support.empty()) return 0.0;
  const auto off = linalg::complement(support, p);
  if (off.empty()) return 0.0;
  const Matrix q_ss = linalg::submatrix(Q, support, support);
  const Matrix q_cs = linalg::submatrix(Q, off, support);
  // Q_{Sᶜ,S} Q_{S,S}⁻¹ = (Q_{S,S}⁻¹ Q_{S,Sᶜ})ᵀ by symmetry.
  const Matrix product = q_ss.ldlt().solve(q_cs.transpose()).transpose();
  return linalg::inf_norm(product);
}

AssumptionReport assumption_report(const Matrix& theta, const StationaryCovariance& cov,
                                   int row, std::optional<double> eta, double support_tol) {
  require_square(theta, "assumption_report");
  require(cov.Q.rows() == theta.rows() && cov.Q.cols() == theta.cols(),
          "assumption_report: covariance dimension mismatch");
  require(row >= 0 && row < theta.rows(), "assumption_report: row out of range");
  if (eta) require(*eta > 0.0, "assumption_report: eta must be positive");

  AssumptionReport report;
  report.row = row;
  report.support = row_support(theta, row, support_tol);
  report.k_observed = static_cast<int>(report.support.size());
  report.rho_min = linalg::rho_min(theta);
  if (eta) {
    const Matrix a = Matrix::Identity(theta.rows(), theta.cols()) + *eta * theta;
    report.d = (1.0 - linalg::sigma_max(a)) / *eta;
  }
  if (report.support.empty()) {
    report.degenerate = true;
    report.alpha = 1.0;
    report.c_min = std::numeric_limits<double>::quiet_NaN();
    report.theta_min_observed = 0.0;
    return report;
  }
  double smallest = std::numeric_limits<double>::infinity();
  for (int j : report.support) smallest = std::min(smallest, std::abs(theta(row, j)));
  report.theta_min_observed = smallest;
  report.c_min =
      linalg::sym_min_eigenvalue(linalg::submatrix(cov.Q, report.support, report.support));
  report.alpha = 1.0 - incoherence(cov.Q, report.support);
  return report;
}

}  // namespace driftrec

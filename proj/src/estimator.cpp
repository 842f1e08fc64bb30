#include "driftrec/estimator.hpp"

#include "driftrec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace driftrec {

// --- normal equations ---------------------------------------------------------

NormalAccumulator::NormalAccumulator(const BasisSet& basis, double eta)
    : basis_(basis),
      eta_(eta),
      ff_(Matrix::Zero(basis.size(), basis.size())),
      fdx_(Matrix::Zero(basis.size(), basis.input_dim())),
      features_(basis.size()) {
  require(eta > 0.0, "NormalAccumulator: eta must be positive");
}

void NormalAccumulator::push(const Vector& x_prev, const Vector& x_next) {
  basis_.eval(std::span<const double>(x_prev.data(), x_prev.size()),
              std::span<double>(features_.data(), features_.size()));
  ff_.selfadjointView<Eigen::Lower>().rankUpdate(features_);
  fdx_.noalias() += features_ * (x_next - x_prev).transpose();
  ++n_;
}

void NormalAccumulator::push_trajectory(const Trajectory& traj, int transitions) {
  require(traj.dim() == basis_.input_dim(), "NormalAccumulator: state dimension mismatch");
  const int n = transitions < 0 ? traj.n() : transitions;
  require(n <= traj.n(), "NormalAccumulator: not enough transitions");
  Vector prev = traj.states.row(0).transpose();
  Vector next(traj.dim());
  for (int t = 0; t < n; ++t) {
    next = traj.states.row(t + 1).transpose();
    push(prev, next);
    prev.swap(next);
  }
}

Matrix NormalAccumulator::qhat() const {
  require(n_ > 0, "normal equations need at least one transition");
  Matrix q = ff_.selfadjointView<Eigen::Lower>();
  return q / static_cast<double>(n_);
}

Matrix NormalAccumulator::ghat() const {
  require(n_ > 0, "normal equations need at least one transition");
  return fdx_ / (static_cast<double>(n_) * eta_);
}

NormalEquations NormalAccumulator::equations(int row) const {
  require(row >= 0 && row < basis_.input_dim(), "normal equations: row out of range");
  NormalEquations ne;
  ne.Qhat = qhat();
  ne.ghat = fdx_.col(row) / (static_cast<double>(n_) * eta_);
  ne.n = n_;
  ne.eta = eta_;
  ne.row = row;
  return ne;
}

NormalEquations build_normal_equations(const Trajectory& traj, const BasisSet& basis, int row) {
  require(traj.n() >= 1, "build_normal_equations: trajectory needs n >= 1 transitions");
  NormalAccumulator acc(basis, traj.eta);
  acc.push_trajectory(traj);
  return acc.equations(row);
}

// --- coordinate descent ---------------------------------------------------------

void RlsConfig::validate() const {
  require(lambda >= 0.0, "RlsConfig: lambda must be >= 0");
  require(tol > 0.0, "RlsConfig: tol must be positive");
  require(max_iter >= 1, "RlsConfig: max_iter must be >= 1");
  if (zero_threshold) require(*zero_threshold >= 0.0, "RlsConfig: zero_threshold must be >= 0");
}

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

double rls_objective(const Matrix& Q, const Vector& g, const Vector& theta, double lambda) {
  return 0.5 * theta.dot(Q * theta) - theta.dot(g) + lambda * theta.lpNorm<1>();
}

namespace {

double kkt_from_gradient(const Vector& grad, const Vector& theta, double lambda) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double v = theta(j) != 0.0 ? std::abs(grad(j) + (theta(j) > 0 ? lambda : -lambda))
                                     : std::max(0.0, std::abs(grad(j)) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

// One coordinate update; returns the change in θ_j.
inline double update_coordinate(const Matrix& Q, Vector& theta, double grad_j, Eigen::Index j,
                                double lambda) {
  const double qjj = Q(j, j);
  const double next = qjj > 0.0 ? soft_threshold(qjj * theta(j) - grad_j, lambda) / qjj : 0.0;
  const double delta = next - theta(j);
  theta(j) = next;
  return delta;
}

}  // namespace

double kkt_violation(const Matrix& Q, const Vector& g, const Vector& theta, double lambda) {
  return kkt_from_gradient(Q * theta - g, theta, lambda);
}

RlsSolution solve_rls(const Matrix& Q, const Vector& g, const RlsConfig& cfg,
                      const Vector* warm_start) {
  cfg.validate();
  const Eigen::Index m = g.size();
  require(Q.rows() == m && Q.cols() == m, "solve_rls: dimension mismatch");
  const double lambda = cfg.lambda;

  RlsSolution sol;
  sol.coef = warm_start ? *warm_start : Vector::Zero(m);
  require(sol.coef.size() == m, "solve_rls: warm start has wrong length");
  Vector grad = Q * sol.coef - g;

  std::vector<Eigen::Index> active;
  while (sol.iterations < cfg.max_iter) {
    // Full sweep over every coordinate.
    for (Eigen::Index j = 0; j < m; ++j) {
      const double delta = update_coordinate(Q, sol.coef, grad(j), j, lambda);
      if (delta != 0.0) grad.noalias() += delta * Q.col(j);
    }
    ++sol.iterations;
    sol.kkt_residual = kkt_from_gradient(grad, sol.coef, lambda);
    if (sol.kkt_residual <= cfg.tol) {
      sol.converged = true;
      break;
    }
    // Inner sweeps restricted to the active set, tracking only its gradient.
    active.clear();
    for (Eigen::Index j = 0; j < m; ++j)
      if (sol.coef(j) != 0.0) active.push_back(j);
    if (active.empty()) continue;
    const auto a = static_cast<Eigen::Index>(active.size());
    Matrix q_aa(a, a);
    Vector grad_a(a);
    for (Eigen::Index u = 0; u < a; ++u) {
      grad_a(u) = grad(active[u]);
      for (Eigen::Index w = 0; w < a; ++w) q_aa(u, w) = Q(active[u], active[w]);
    }
    Vector theta_a(a);
    for (Eigen::Index u = 0; u < a; ++u) theta_a(u) = sol.coef(active[u]);
    // Feature-sign search on the active block: exact solve for the current
    // signs, then a line search over the zero crossings if the signs flip.
    // Coordinate descent alone crawls when the features are nearly collinear.
    bool exact = false;
    {
      Vector g_a(a);
      for (Eigen::Index u = 0; u < a; ++u) g_a(u) = g(active[u]);
      auto objective = [&](const Vector& t) {
        return 0.5 * t.dot(q_aa * t) - t.dot(g_a) + lambda * t.lpNorm<1>();
      };
      for (Eigen::Index round = 0; round <= a && sol.iterations < cfg.max_iter; ++round) {
        ++sol.iterations;
        std::vector<Eigen::Index> nz;
        for (Eigen::Index u = 0; u < a; ++u)
          if (theta_a(u) != 0.0) nz.push_back(u);
        if (nz.empty()) {
          exact = true;
          break;
        }
        const auto s = static_cast<Eigen::Index>(nz.size());
        Matrix q_ss(s, s);
        Vector rhs(s);
        for (Eigen::Index u = 0; u < s; ++u) {
          rhs(u) = g_a(nz[u]) - (theta_a(nz[u]) > 0 ? lambda : -lambda);
          for (Eigen::Index w = 0; w < s; ++w) q_ss(u, w) = q_aa(nz[u], nz[w]);
        }
        // Q̂ can be singular (the pairwise mass-spring features are
        // redundant). If the residual has a null-space part the objective
        // falls linearly along it, so walk to the first zero crossing;
        // otherwise take the pseudo-inverse Newton step.
        Vector x0(s);
        for (Eigen::Index u = 0; u < s; ++u) x0(u) = theta_a(nz[u]);
        const Eigen::SelfAdjointEigenSolver<Matrix> es(q_ss);
        if (es.info() != Eigen::Success) break;
        const Vector r = rhs - q_ss * x0;
        const double cut = 1e-10 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
        Vector coeffs = es.eigenvectors().transpose() * r;
        Vector null_dir = Vector::Zero(s);
        Vector newton = Vector::Zero(s);
        for (Eigen::Index i = 0; i < s; ++i) {
          const double w = es.eigenvalues()(i);
          if (w <= cut)
            null_dir += coeffs(i) * es.eigenvectors().col(i);
          else
            newton += (coeffs(i) / w) * es.eigenvectors().col(i);
        }
        Vector x;
        if (null_dir.norm() > 1e-12 * (1.0 + r.norm())) {
          double t_hit = std::numeric_limits<double>::infinity();
          Eigen::Index hit = -1;
          for (Eigen::Index u = 0; u < s; ++u) {
            if (null_dir(u) == 0.0 || (null_dir(u) > 0) == (x0(u) > 0)) continue;
            const double t = -x0(u) / null_dir(u);
            if (t < t_hit) {
              t_hit = t;
              hit = u;
            }
          }
          if (hit < 0) break;
          x = x0 + t_hit * null_dir;
          x(hit) = 0.0;
        } else {
          x = x0 + newton;
        }
        if (!x.allFinite()) break;
        Vector cand = Vector::Zero(a);
        for (Eigen::Index u = 0; u < s; ++u) cand(nz[u]) = x(u);
        bool same = true;
        for (Eigen::Index u : nz) same = same && (cand(u) > 0) == (theta_a(u) > 0) && cand(u) != 0.0;
        if (same) {
          theta_a = cand;
          exact = true;
          break;
        }
        // Best point among the candidate and the sign changes on the segment.
        Vector best = cand;
        double best_obj = objective(cand);
        for (Eigen::Index u : nz) {
          if ((cand(u) > 0) == (theta_a(u) > 0) && cand(u) != 0.0) continue;
          const double t = theta_a(u) / (theta_a(u) - cand(u));
          Vector pt = theta_a + t * (cand - theta_a);
          pt(u) = 0.0;
          const double o = objective(pt);
          if (o < best_obj) {
            best_obj = o;
            best = pt;
          }
        }
        if (best_obj >= objective(theta_a)) break;
        theta_a = best;
      }
      grad_a = q_aa * theta_a - g_a;
    }
    // Bounded so the exact step gets another chance once the signs settle.
    for (int sweep = 0; !exact && sweep < 50 && sol.iterations < cfg.max_iter; ++sweep) {
      for (Eigen::Index u = 0; u < a; ++u) {
        const double delta = update_coordinate(q_aa, theta_a, grad_a(u), u, lambda);
        if (delta != 0.0) grad_a.noalias() += delta * q_aa.col(u);
      }
      ++sol.iterations;
      if (kkt_from_gradient(grad_a, theta_a, lambda) <= 0.1 * cfg.tol) break;
    }
    for (Eigen::Index u = 0; u < a; ++u) sol.coef(active[u]) = theta_a(u);
    grad = Q * sol.coef - g;
    sol.kkt_residual = kkt_from_gradient(grad, sol.coef, lambda);
    if (sol.kkt_residual <= cfg.tol) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) sol.kkt_residual = kkt_from_gradient(Q * sol.coef - g, sol.coef, lambda);
  return sol;
}

RlsSolution solve_rls(const NormalEquations& ne, const RlsConfig& cfg) {
  return solve_rls(ne.Qhat, ne.ghat, cfg);
}

std::vector<RlsSolution> solve_rls_path(const Matrix& Q, const Vector& g,
                                        const std::vector<double>& lambdas,
                                        const RlsConfig& cfg) {
  std::vector<std::size_t> order(lambdas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });
  std::vector<RlsSolution> out(lambdas.size());
  Vector warm = Vector::Zero(g.size());
  RlsConfig step = cfg;
  for (std::size_t idx : order) {
    step.lambda = lambdas[idx];
    out[idx] = solve_rls(Q, g, step, &warm);
    warm = out[idx].coef;
  }
  return out;
}

double default_zero_threshold(const Vector& coef) {
  const double scale = coef.size() ? coef.cwiseAbs().maxCoeff() : 0.0;
  return 1e-6 * std::max(1.0, scale);
}

Eigen::VectorXi sign_pattern(const Vector& coef, double zero_threshold) {
  Eigen::VectorXi s(coef.size());
  for (Eigen::Index j = 0; j < coef.size(); ++j) {
    const double v = coef(j);
    s(j) = std::abs(v) <= zero_threshold ? 0 : (v > 0 ? 1 : -1);
  }
  return s;
}

Eigen::VectorXi threshold_signs(const Vector& coef, double theta_min) {
  Eigen::VectorXi s(coef.size());
  const double half = theta_min / 2.0;
  for (Eigen::Index j = 0; j < coef.size(); ++j) {
    const double v = coef(j);
    s(j) = v > half ? 1 : (v < -half ? -1 : 0);
  }
  return s;
}

bool RecoveryResult::all_converged() const {
  return std::all_of(per_row_converged.begin(), per_row_converged.end(),
                     [](bool c) { return c; });
}

RecoveryResult recover(const NormalAccumulator& acc, int rows, const RlsConfig& cfg) {
  cfg.validate();
  const Matrix q = acc.qhat();
  const Matrix g = acc.ghat();
  require(rows >= 1 && rows <= g.cols(), "recover: row count out of range");
  RecoveryResult result;
  result.theta_hat.resize(rows, q.rows());
  result.signed_support.resize(rows, q.rows());
  result.lambda_used = cfg.lambda;
  for (int r = 0; r < rows; ++r) {
    const RlsSolution sol = solve_rls(q, g.col(r), cfg);
    const double thr = cfg.zero_threshold.value_or(default_zero_threshold(sol.coef));
    result.theta_hat.row(r) = sol.coef.transpose();
    result.signed_support.row(r) = sign_pattern(sol.coef, thr).transpose();
    result.per_row_iters.push_back(sol.iterations);
    result.per_row_kkt_residual.push_back(sol.kkt_residual);
    result.per_row_converged.push_back(sol.converged);
  }
  return result;
}

RecoveryResult recover(const Trajectory& traj, const BasisSet& basis, const RlsConfig& cfg) {
  require(traj.n() >= 1, "recover: trajectory needs n >= 1 transitions");
  NormalAccumulator acc(basis, traj.eta);
  acc.push_trajectory(traj);
  return recover(acc, traj.dim(), cfg);
}

Vector least_squares_row(const NormalEquations& ne) {
  Eigen::LLT<Matrix> llt(ne.Qhat);
  if (llt.info() != Eigen::Success)
    throw NumericalError("threshold_estimator: empirical covariance is singular");
  return llt.solve(ne.ghat);
}

RecoveryResult threshold_estimator(const Trajectory& traj, const BasisSet& basis,
                                   double theta_min) {
  require(theta_min > 0.0, "threshold_estimator: theta_min must be positive");
  require(traj.n() >= 1, "threshold_estimator: trajectory needs n >= 1 transitions");
  NormalAccumulator acc(basis, traj.eta);
  acc.push_trajectory(traj);
  const Matrix q = acc.qhat();
  const Matrix g = acc.ghat();
  Eigen::LLT<Matrix> llt(q);
  if (llt.info() != Eigen::Success)
    throw NumericalError("threshold_estimator: empirical covariance is singular");
  const Matrix coef = llt.solve(g);  // m × dim
  RecoveryResult result;
  result.theta_hat = coef.transpose();
  result.signed_support.resize(result.theta_hat.rows(), result.theta_hat.cols());
  for (Eigen::Index r = 0; r < result.theta_hat.rows(); ++r) {
    result.signed_support.row(r) =
        threshold_signs(result.theta_hat.row(r).transpose(), theta_min).transpose();
    result.per_row_iters.push_back(0);
    result.per_row_kkt_residual.push_back(
        (q * result.theta_hat.row(r).transpose() - g.col(r)).cwiseAbs().maxCoeff());
    result.per_row_converged.push_back(true);
  }
  return result;
}

Proposition1Report proposition1_check(const NormalEquations& ne, const Vector& theta0_row,
                                      const StationaryCovariance& Q0, double lambda,
                                      double alpha, double c_min, double theta_min, int k) {
  const Eigen::Index m = ne.ghat.size();
  require(ne.Qhat.rows() == m && ne.Qhat.cols() == m && theta0_row.size() == m &&
              Q0.Q.rows() == m && Q0.Q.cols() == m,
          "proposition1_check: dimension mismatch");
  require(k >= 1, "proposition1_check: k must be >= 1");

  std::vector<int> support;
  for (Eigen::Index j = 0; j < m; ++j)
    if (theta0_row(j) != 0.0) support.push_back(static_cast<int>(j));
  const auto off = linalg::complement(support, static_cast<int>(m));

  Proposition1Report rep;
  const Vector score = ne.ghat - ne.Qhat * theta0_row;
  rep.score_inf = score.cwiseAbs().maxCoeff();
  rep.score_support_inf =
      support.empty() ? 0.0 : linalg::subvector(score, support).cwiseAbs().maxCoeff();
  const Matrix diff = ne.Qhat - Q0.Q;
  rep.offsupport_deviation = linalg::inf_norm(linalg::submatrix(diff, off, support));
  rep.support_deviation = linalg::inf_norm(linalg::submatrix(diff, support, support));

  const double hessian_tol = alpha / 12.0 * c_min / std::sqrt(static_cast<double>(k));
  rep.score_bound = rep.score_inf <= lambda * alpha / 3.0;
  rep.support_score_bound = rep.score_support_inf <= theta_min * c_min / (4.0 * k) - lambda;
  rep.offsupport_hessian = rep.offsupport_deviation <= hessian_tol;
  rep.support_hessian = rep.support_deviation <= hessian_tol;
  return rep;
}

}  // namespace driftrec

#include "driftrec/sim.hpp"

#include <cmath>
#include <sstream>

namespace driftrec {

namespace {

void check_finite(const Vector& x, long long step, const char* what) {
  if (!x.allFinite()) {
    throw NumericalError(std::string(what) + ": non-finite state at step " +
                         std::to_string(step));
  }
}

std::string format_tag(const std::string& name, double value) {
  std::ostringstream os;
  os << name << "(" << value << ")";
  return os.str();
}

}  // namespace

Vector sample_gaussian(const Matrix& cov, Rng& rng) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError("sample_gaussian: covariance is not positive definite");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(cov.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return llt.matrixL() * z;
}

Vector sample_stationary_init(const StationaryCovariance& cov, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_gaussian(cov.Q, rng);
}

LinearStepper::LinearStepper(const Matrix& theta, double step, Vector x0, std::uint64_t seed)
    : theta_(theta),
      step_(step),
      noise_scale_(std::sqrt(step)),
      x_(std::move(x0)),
      scratch_(x_.size()),
      rng_(make_rng(seed)) {
  require(theta.rows() == theta.cols(), "LinearStepper: drift must be square");
  require(x_.size() == theta.rows(), "LinearStepper: initial state dimension mismatch");
  require(step > 0.0, "LinearStepper: step must be positive");
}

void LinearStepper::advance() {
  scratch_.noalias() = theta_ * x_;
  x_ += step_ * scratch_;
  for (Eigen::Index i = 0; i < x_.size(); ++i) x_(i) += noise_scale_ * normal_(rng_);
  ++steps_;
  check_finite(x_, steps_, "simulate");
}

Trajectory simulate_discrete(const Matrix& theta, double eta, int n, const Vector& x0,
                             std::uint64_t seed) {
  require(n >= 1, "simulate_discrete: n must be >= 1");
  require(eta > 0.0, "simulate_discrete: eta must be positive");
  LinearStepper stepper(theta, eta, x0, seed);
  Trajectory traj;
  traj.states.resize(n + 1, x0.size());
  traj.states.row(0) = x0.transpose();
  for (int t = 1; t <= n; ++t) {
    stepper.advance();
    traj.states.row(t) = stepper.state().transpose();
  }
  traj.eta = eta;
  traj.seed = seed;
  traj.model_tag = "discrete";
  return traj;
}

int subsample_factor(double eta_sample, double eta_fine) {
  require(eta_fine > 0.0 && eta_sample > 0.0, "step sizes must be positive");
  const double ratio = eta_sample / eta_fine;
  const long long factor = std::llround(ratio);
  require(factor >= 1 && std::abs(ratio - static_cast<double>(factor)) <= 1e-9 * ratio,
          "eta_sample must be an integer multiple of eta_fine");
  return static_cast<int>(factor);
}

Trajectory simulate_continuous(const Matrix& theta, double T, double eta_sample,
                               double eta_fine, const Vector& x0, std::uint64_t seed) {
  const int factor = subsample_factor(eta_sample, eta_fine);
  require(T > 0.0, "simulate_continuous: T must be positive");
  const double samples = T / eta_sample;
  const long long n = std::llround(samples);
  require(n >= 1 && std::abs(samples - static_cast<double>(n)) <= 1e-9 * samples,
          "simulate_continuous: eta_sample must divide T");
  LinearStepper stepper(theta, eta_fine, x0, seed);
  Trajectory traj;
  traj.states.resize(n + 1, x0.size());
  traj.states.row(0) = x0.transpose();
  for (long long t = 1; t <= n; ++t) {
    for (int s = 0; s < factor; ++s) stepper.advance();
    traj.states.row(t) = stepper.state().transpose();
  }
  traj.eta = eta_sample;
  traj.seed = seed;
  traj.model_tag = format_tag("continuous", eta_fine);
  return traj;
}

Trajectory subsample(const Trajectory& traj, int factor) {
  require(factor >= 1, "subsample: factor must be >= 1");
  const int n = traj.n() / factor;
  Trajectory out;
  out.states.resize(n + 1, traj.dim());
  for (int t = 0; t <= n; ++t) out.states.row(t) = traj.states.row(t * factor);
  out.eta = traj.eta * factor;
  out.seed = traj.seed;
  out.model_tag = traj.model_tag;
  return out;
}

// --- mass-spring -------------------------------------------------------------

void MassSpringParams::validate() const {
  const int p = masses();
  require(p >= 2 && adjacency.cols() == p, "mass-spring: adjacency must be square, p >= 2");
  require(rest_lengths.rows() == p && rest_lengths.cols() == p,
          "mass-spring: rest length matrix shape mismatch");
  require(dim >= 1, "mass-spring: dimension must be >= 1");
  require(gamma > 0.0 && sigma >= 0.0, "mass-spring: need gamma > 0 and sigma >= 0");
  for (int i = 0; i < p; ++i) {
    require(adjacency(i, i) == 0.0, "mass-spring: adjacency must have zero diagonal");
    for (int j = 0; j < p; ++j) {
      require(adjacency(i, j) == adjacency(j, i) &&
                  (adjacency(i, j) == 0.0 || adjacency(i, j) == 1.0),
              "mass-spring: adjacency must be symmetric 0/1");
      require(rest_lengths(i, j) == rest_lengths(j, i), "mass-spring: rest lengths must be symmetric");
      if (adjacency(i, j) != 0.0)
        require(rest_lengths(i, j) >= 0.0, "mass-spring: rest lengths must be >= 0 on edges");
    }
  }
}

MassSpringParams make_mass_spring(const Matrix& adjacency, int dim, double gamma,
                                  double sigma) {
  MassSpringParams params;
  params.adjacency = adjacency;
  params.rest_lengths = adjacency;  // unit rest length on each edge
  params.dim = dim;
  params.gamma = gamma;
  params.sigma = sigma;
  params.validate();
  return params;
}

double spring_potential(const MassSpringParams& params, const Vector& q) {
  const int p = params.masses();
  const int d = params.dim;
  double u = 0.0;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (params.adjacency(i, j) == 0.0) continue;
      const double len = (q.segment(i * d, d) - q.segment(j * d, d)).norm();
      const double stretch = len - params.rest_lengths(i, j);
      u += 0.5 * params.adjacency(i, j) * stretch * stretch;
    }
  }
  return u;
}

double mechanical_energy(const MassSpringParams& params, const Vector& state) {
  const int pd = params.masses() * params.dim;
  require(state.size() == 2 * pd, "mechanical_energy: state length mismatch");
  return 0.5 * state.tail(pd).squaredNorm() + spring_potential(params, state.head(pd));
}

MassSpringStepper::MassSpringStepper(const MassSpringParams& params, double dt, Vector state,
                                     std::uint64_t seed)
    : params_(params), dt_(dt), x_(std::move(state)), rng_(make_rng(seed)) {
  params.validate();
  require(dt > 0.0, "simulate_mass_spring: dt must be positive");
  require(x_.size() == 2 * params.masses() * params.dim,
          "simulate_mass_spring: state length must be 2*p*d");
  grad_.resize(params.masses() * params.dim);
}

void MassSpringStepper::advance() {
  const int p = params_.masses();
  const int d = params_.dim;
  const int pd = p * d;
  grad_.setZero();
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (params_.adjacency(i, j) == 0.0) continue;
      double norm2 = 0.0;
      for (int a = 0; a < d; ++a) {
        const double diff = x_(i * d + a) - x_(j * d + a);
        norm2 += diff * diff;
      }
      const double norm = std::sqrt(norm2);
      if (norm == 0.0) {
        if (params_.zero_force) continue;
        throw NumericalError("simulate_mass_spring: connected masses " + std::to_string(i) +
                             " and " + std::to_string(j) + " coincide at step " +
                             std::to_string(steps_));
      }
      const double scale = params_.adjacency(i, j) * (norm - params_.rest_lengths(i, j)) / norm;
      for (int a = 0; a < d; ++a) {
        const double f = scale * (x_(i * d + a) - x_(j * d + a));
        grad_(i * d + a) += f;
        grad_(j * d + a) -= f;
      }
    }
  }
  const double noise = params_.sigma * std::sqrt(dt_);
  auto q = x_.head(pd);
  auto v = x_.tail(pd);
  v += dt_ * (-params_.gamma * v - grad_);
  if (noise > 0.0) {
    for (int i = 0; i < pd; ++i) v(i) += noise * normal_(rng_);
  }
  q += dt_ * v;
  ++steps_;
  check_finite(x_, steps_, "simulate_mass_spring");
}

Trajectory simulate_mass_spring(const MassSpringParams& params, double dt, double T,
                                const Vector& q0, const Vector& v0, std::uint64_t seed) {
  const int pd = params.masses() * params.dim;
  require(q0.size() == pd && v0.size() == pd, "simulate_mass_spring: q0/v0 must have length p*d");
  require(T > 0.0, "simulate_mass_spring: T must be positive");
  const long long n = std::max<long long>(1, std::llround(T / dt));
  Vector x(2 * pd);
  x << q0, v0;
  MassSpringStepper stepper(params, dt, x, seed);
  Trajectory traj;
  traj.states.resize(n + 1, 2 * pd);
  traj.states.row(0) = x.transpose();
  for (long long t = 1; t <= n; ++t) {
    stepper.advance();
    traj.states.row(t) = stepper.state().transpose();
  }
  traj.eta = dt;
  traj.seed = seed;
  traj.model_tag = "mass-spring";
  return traj;
}

Matrix mass_spring_coefficients(const MassSpringParams& params) {
  params.validate();
  const int p = params.masses();
  const int d = params.dim;
  const int pd = p * d;
  const int pairs = p * (p - 1) / 2;
  const BasisSet basis = mass_spring_basis(p, d);
  Matrix theta = Matrix::Zero(2 * pd, basis.size());
  for (int c = 0; c < pd; ++c) {
    theta(c, c) = 1.0;                // dq = v dt
    theta(pd + c, c) = -params.gamma;  // damping
  }
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const double c = params.adjacency(i, j);
      if (c == 0.0) continue;
      const int pair = BasisSet::pair_index(i, j, p);
      for (int a = 0; a < d; ++a) {
        const int delta_col = pd + pair * d + a;
        const int unit_col = pd + pairs * d + pair * d + a;
        // Δ_ij = q_i − q_j enters v_i with −C and v_j with +C; the normalized
        // direction enters with the opposite signs, scaled by the rest length.
        theta(pd + i * d + a, delta_col) = -c;
        theta(pd + j * d + a, delta_col) = c;
        theta(pd + i * d + a, unit_col) = c * params.rest_lengths(i, j);
        theta(pd + j * d + a, unit_col) = -c * params.rest_lengths(i, j);
      }
    }
  }
  return theta;
}

Vector random_positions(int masses, int dim, double spread, Rng& rng) {
  std::normal_distribution<double> normal(0.0, spread);
  Vector q(masses * dim);
  for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = normal(rng);
  return q;
}

// --- basis drift ---------------------------------------------------------------

BasisDriftStepper::BasisDriftStepper(const Matrix& theta, const BasisSet& basis, double dt,
                                     double sigma, Vector x0, std::uint64_t seed)
    : theta_(theta),
      basis_(basis),
      dt_(dt),
      noise_scale_(sigma * std::sqrt(dt)),
      x_(std::move(x0)),
      features_(basis.size()),
      rng_(make_rng(seed)) {
  require(dt > 0.0 && sigma >= 0.0, "simulate_basis_drift: need dt > 0 and sigma >= 0");
  require(theta.cols() == basis.size(), "simulate_basis_drift: theta columns must equal basis size");
  require(theta.rows() == basis.input_dim() && x_.size() == basis.input_dim(),
          "simulate_basis_drift: state dimension mismatch");
}

void BasisDriftStepper::advance() {
  basis_.eval(std::span<const double>(x_.data(), x_.size()),
              std::span<double>(features_.data(), features_.size()));
  x_ += dt_ * (theta_ * features_);
  for (Eigen::Index i = 0; i < x_.size(); ++i) x_(i) += noise_scale_ * normal_(rng_);
  ++steps_;
  check_finite(x_, steps_, "simulate_basis_drift");
}

Trajectory simulate_basis_drift(const Matrix& theta, const BasisSet& basis, double dt, int n,
                                const Vector& x0, double sigma, std::uint64_t seed) {
  require(n >= 1, "simulate_basis_drift: n must be >= 1");
  BasisDriftStepper stepper(theta, basis, dt, sigma, x0, seed);
  Trajectory traj;
  traj.states.resize(n + 1, x0.size());
  traj.states.row(0) = x0.transpose();
  for (int t = 1; t <= n; ++t) {
    stepper.advance();
    traj.states.row(t) = stepper.state().transpose();
  }
  traj.eta = dt;
  traj.seed = seed;
  traj.model_tag = "basis-drift";
  return traj;
}

Matrix pathway_coefficients(const PathwayParams& k) {
  require(k.influx.size() == 9, "pathway: influx must have 9 entries");
  const int p = 9;
  const BasisSet basis = monomial_basis_deg2(p);
  Matrix theta = Matrix::Zero(p, basis.size());
  // Species (0-based): 0 R, 1 L, 2 LR*, 3 LR*K, 4 K, 5 K*, 6 S, 7 K*S, 8 S*.
  const auto lin = [](int i) { return 1 + i; };
  const auto quad = [p](int i, int j) {
    return 1 + p + BasisSet::pair_index(std::min(i, j), std::max(i, j), p);
  };
  for (int i = 0; i < p; ++i) {
    theta(i, 0) = k.influx(i);
    theta(i, lin(i)) = -k.decay;
  }
  // R + L ⇌ LR*
  for (int s : {0, 1}) {
    theta(s, quad(0, 1)) -= k.kf1;
    theta(s, lin(2)) += k.kr1;
  }
  theta(2, quad(0, 1)) += k.kf1;
  theta(2, lin(2)) -= k.kr1;
  // LR* + K ⇌ LR*K
  for (int s : {2, 4}) {
    theta(s, quad(2, 4)) -= k.kf2;
    theta(s, lin(3)) += k.kr2;
  }
  theta(3, quad(2, 4)) += k.kf2;
  theta(3, lin(3)) -= k.kr2;
  // LR*K → LR* + K*
  theta(3, lin(3)) -= k.kf3;
  theta(2, lin(3)) += k.kf3;
  theta(5, lin(3)) += k.kf3;
  // K* + S ⇌ K*S
  for (int s : {5, 6}) {
    theta(s, quad(5, 6)) -= k.kf4;
    theta(s, lin(7)) += k.kr4;
  }
  theta(7, quad(5, 6)) += k.kf4;
  theta(7, lin(7)) -= k.kr4;
  // K*S → K* + S*
  theta(7, lin(7)) -= k.kf5;
  theta(5, lin(7)) += k.kf5;
  theta(8, lin(7)) += k.kf5;
  return theta;
}

}  // namespace driftrec

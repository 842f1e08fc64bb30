#include "driftrec/bounds.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace driftrec::bounds {

namespace {

void require_positive(double v, const char* name) {
  require(std::isfinite(v) && v > 0.0, std::string(name) + " must be positive");
}

void require_delta(double delta) {
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
}

}  // namespace

double lambda_theorem1(double T, double alpha, double rho_min, int p, double delta) {
  require_positive(T, "T");
  return std::sqrt(36.0 * std::log(4.0 * p / delta) / (T * alpha * alpha * rho_min));
}

double lambda_theorem4(double n_eta, double d, double alpha, int p, double delta) {
  require_positive(n_eta, "n*eta");
  return std::sqrt(36.0 * std::log(4.0 * p / delta) / (d * alpha * alpha * n_eta));
}

double lambda_laplacian(double T, int k, double m, int p, double delta) {
  require_positive(T, "T");
  const double h = k + m;
  return std::sqrt(36.0 * h * h * std::log(4.0 * p / delta) / (T * m * m * m));
}

BoundReport ub_sparse_continuous(int k, double rho_min, double theta_min, double alpha,
                                 double c_min, int p, double delta) {
  require(k >= 1 && p >= 1, "k and p must be >= 1");
  require_positive(rho_min, "rho_min");
  require_positive(theta_min, "theta_min");
  require_positive(c_min, "C_min");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require_delta(delta);
  const double kk = k;
  BoundReport r;
  r.name = "theorem1";
  r.value = 2e4 * kk * kk * (kk / (rho_min * rho_min) + 1.0 / (theta_min * theta_min)) /
            (alpha * alpha * rho_min * c_min * c_min) * std::log(4.0 * p * kk / delta);
  r.inputs = {{"k", kk}, {"rho_min", rho_min}, {"theta_min", theta_min}, {"alpha", alpha},
              {"c_min", c_min}, {"p", double(p)}, {"delta", delta}};
  r.lambda_at = [=](double T) { return lambda_theorem1(T, alpha, rho_min, p, delta); };
  return r;
}

BoundReport ub_discrete(int k, double d, double theta_min, double alpha, double c_min, int p,
                        double delta) {
  require(k >= 1 && p >= 1, "k and p must be >= 1");
  require_positive(d, "D");
  require_positive(theta_min, "theta_min");
  require_positive(c_min, "C_min");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
  require_delta(delta);
  const double kk = k;
  BoundReport r;
  r.name = "theorem4";
  r.value = 1e4 * kk * kk * (kk / (d * d) + 1.0 / (theta_min * theta_min)) /
            (alpha * alpha * d * c_min * c_min) * std::log(4.0 * p * kk / delta);
  r.inputs = {{"k", kk}, {"d", d}, {"theta_min", theta_min}, {"alpha", alpha},
              {"c_min", c_min}, {"p", double(p)}, {"delta", delta}};
  r.lambda_at = [=](double n_eta) { return lambda_theorem4(n_eta, d, alpha, p, delta); };
  return r;
}

BoundReport ub_laplacian(int k, double m, int p, double delta) {
  require(k >= 1 && p >= 1, "k and p must be >= 1");
  require_positive(m, "m");
  require_delta(delta);
  const double kk = k;
  BoundReport r;
  r.name = "theorem3";
  r.value = 4e5 * kk * kk * std::pow((kk + m) / m, 5) * (kk + m * m) *
            std::log(4.0 * p * kk / delta);
  r.inputs = {{"k", kk}, {"m", m}, {"p", double(p)}, {"delta", delta}};
  r.lambda_at = [=](double T) { return lambda_laplacian(T, k, m, p, delta); };
  return r;
}

BoundReport lb_sparse(int k, double rho_min, double theta_min, int p, double c) {
  require(k >= 1 && p >= 2, "need k >= 1 and p >= 2");
  require_positive(rho_min, "rho_min");
  require_positive(theta_min, "theta_min");
  require_positive(c, "C");
  BoundReport r;
  r.name = "theorem2";
  r.value = c * std::max(rho_min / (theta_min * theta_min), 1.0 / theta_min) *
            std::log(static_cast<double>(p));
  r.inputs = {{"k", double(k)}, {"rho_min", rho_min}, {"theta_min", theta_min},
              {"p", double(p)}, {"c", c}};
  r.up_to_constant = true;
  return r;
}

BoundReport lb_dense(double rho_min, double theta_min, int p, double c) {
  require(p >= 1, "p must be >= 1");
  require_positive(rho_min, "rho_min");
  require_positive(theta_min, "theta_min");
  require_positive(c, "C");
  BoundReport r;
  r.name = "theorem5";
  r.value = c * std::max(rho_min / (theta_min * theta_min), 1.0 / theta_min) * p;
  r.inputs = {{"rho_min", rho_min}, {"theta_min", theta_min}, {"p", double(p)}, {"c", c}};
  r.up_to_constant = true;
  return r;
}

BoundReport lb_nonlinear(int k, int p, double b, double l, double d, double c) {
  require(k >= 1 && p > k, "need p > k >= 1");
  require_positive(l, "L");
  require(b >= l, "need B >= L");
  require(d >= 0.0 && c >= 0.0, "D and C must be >= 0");
  const double kk = k;
  const double denom = c + 2.0 * kk * kk * d * d * b;
  require(denom > 0.0, "lb_nonlinear: denominator C + 2k²D²B must be positive");
  BoundReport r;
  r.name = "theorem6";
  r.value = (kk * std::log(static_cast<double>(p) / kk) - std::log(b / l)) / denom;
  r.inputs = {{"k", kk}, {"p", double(p)}, {"b", b}, {"l", l}, {"d", d}, {"c", c}};
  r.vacuous = r.value <= 0.0;
  return r;
}

BoundReport lb_generic(double entropy, double log_alphabet, double mutual_information,
                       double denominator) {
  require_positive(denominator, "denominator");
  BoundReport r;
  r.name = "lemma7";
  r.value = (entropy - log_alphabet - 2.0 * mutual_information - 2.0) / denominator;
  r.inputs = {{"entropy", entropy}, {"log_alphabet", log_alphabet},
              {"mutual_information", mutual_information}, {"denominator", denominator}};
  r.vacuous = r.value <= 0.0;
  return r;
}

DenominatorEstimate lb_generic_denominator_mc(const MatrixSampler& sampler, int p,
                                              int num_samples, std::uint64_t seed) {
  require(p >= 1, "p must be >= 1");
  require(num_samples >= 2, "need at least two samples");
  std::vector<double> traces(num_samples);
  std::vector<Matrix> inverses;
  inverses.reserve(num_samples);
  Matrix inverse_sum = Matrix::Zero(p, p);
  for (int s = 0; s < num_samples; ++s) {
    const Matrix theta = sampler(mix_seed(seed, s));
    require(theta.rows() == p && theta.cols() == p, "sampler returned wrong dimension");
    traces[s] = -theta.trace();
    Matrix neg_inv = -theta.inverse();
    inverse_sum += neg_inv;
    inverses.push_back(std::move(neg_inv));
  }
  const double n = num_samples;
  const auto estimate = [p](double trace_mean, const Matrix& mean_inverse) {
    Eigen::FullPivLU<Matrix> lu(mean_inverse);
    if (!lu.isInvertible()) throw NumericalError("lb_generic_denominator_mc: singular mean");
    return 0.5 * (trace_mean - lu.inverse().trace()) / p;
  };
  double trace_sum = 0.0;
  for (double t : traces) trace_sum += t;

  DenominatorEstimate out;
  out.samples = num_samples;
  out.value = estimate(trace_sum / n, inverse_sum / n);
  // Jackknife standard error over samples.
  std::vector<double> loo(num_samples);
  double loo_mean = 0.0;
  for (int s = 0; s < num_samples; ++s) {
    loo[s] = estimate((trace_sum - traces[s]) / (n - 1.0), (inverse_sum - inverses[s]) / (n - 1.0));
    loo_mean += loo[s];
  }
  loo_mean /= n;
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  out.standard_error = std::sqrt((n - 1.0) / n * ss);
  return out;
}

DenominatorEstimate mean_inverse_trace_mc(const MatrixSampler& sampler, int p,
                                          int num_samples, std::uint64_t seed) {
  require(p >= 1, "p must be >= 1");
  require(num_samples >= 2, "need at least two samples");
  std::vector<double> values(num_samples);
  for (int s = 0; s < num_samples; ++s) {
    const Matrix theta = sampler(mix_seed(seed, s));
    require(theta.rows() == p && theta.cols() == p, "sampler returned wrong dimension");
    Eigen::SelfAdjointEigenSolver<Matrix> es(-theta, Eigen::EigenvaluesOnly);
    values[s] = es.eigenvalues().cwiseInverse().sum() / p;
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= num_samples;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  DenominatorEstimate out;
  out.samples = num_samples;
  out.value = mean;
  out.standard_error = std::sqrt(ss / (num_samples - 1.0) / num_samples);
  return out;
}

double kesten_mckay_density(int k, double nu) {
  require(k >= 3, "Kesten-McKay law needs k >= 3");
  const double edge2 = 4.0 * (k - 1);
  if (nu * nu >= edge2) return 0.0;
  return k / (2.0 * std::numbers::pi) * std::sqrt(edge2 - nu * nu) /
         (static_cast<double>(k) * k - nu * nu);
}

double kesten_mckay_G(int k, double z) {
  require(k >= 3, "kesten_mckay_G: need k >= 3");
  const double edge = 2.0 * std::sqrt(static_cast<double>(k - 1));
  require(z > edge, "kesten_mckay_G: z must lie above the spectrum edge 2*sqrt(k-1)");
  const double root = std::sqrt(z * z - 4.0 * k + 4.0);
  return 2.0 * (k - 1) / ((k - 2) * z + k * root);
}

double kesten_mckay_G_numeric(int k, double z, double tol) {
  require(k >= 3, "kesten_mckay_G_numeric: need k >= 3");
  const double edge = 2.0 * std::sqrt(static_cast<double>(k - 1));
  require(z > edge, "kesten_mckay_G_numeric: z must lie above the spectrum edge");
  // ν = edge·sin(φ) removes the square-root endpoint singularities.
  const auto integrand = [=](double phi) {
    const double nu = edge * std::sin(phi);
    const double jac = edge * std::cos(phi);
    return kesten_mckay_density(k, nu) * jac / (z - nu);
  };
  using boost::math::quadrature::gauss_kronrod;
  const double half_pi = std::numbers::pi / 2.0;
  return gauss_kronrod<double, 61>::integrate(integrand, -half_pi, half_pi, 20, tol);
}

double denominator_sparse(double theta_min, int k, double rho) {
  require_positive(theta_min, "theta_min");
  require(rho >= 0.0, "rho must be >= 0");
  require(k >= 3, "denominator_sparse: need k >= 3");
  const double edge = 2.0 * std::sqrt(static_cast<double>(k - 1));
  if (rho == 0.0) {
    return theta_min * k / std::sqrt(static_cast<double>(k - 1));
  }
  return rho + theta_min * edge - theta_min / kesten_mckay_G(k, rho / theta_min + edge);
}

double wigner_C(double alpha, double rho) {
  require_positive(alpha, "alpha");
  require(rho >= 0.0, "rho must be >= 0");
  const double sa = std::sqrt(alpha);
  return (-std::sqrt(rho * (4.0 * sa + rho)) + 2.0 * sa + rho) / (2.0 * alpha);
}

double denominator_dense(double theta_min, double rho) {
  require_positive(theta_min, "theta_min");
  require(rho >= 0.0, "rho must be >= 0");
  const double alpha = theta_min * theta_min / 2.0;
  return rho + 2.0 * std::sqrt(alpha) - 1.0 / wigner_C(alpha, rho);
}

}  // namespace driftrec::bounds

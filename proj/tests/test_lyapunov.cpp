#include <doctest.h>

#include "driftrec/ensembles.hpp"
#include "driftrec/linalg.hpp"
#include "driftrec/lyapunov.hpp"

#include <cmath>

using namespace driftrec;

namespace {

Matrix footnote_theta() {
  Matrix t(3, 3);
  t << -2, -1, -1, 1, -2, -1, 1, 1, -2;
  return t;
}

Matrix path3() {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = a(1, 0) = a(1, 2) = a(2, 1) = 1;
  return a;
}

}  // namespace

TEST_SUITE("lyapunov") {

TEST_CASE("half identity gives identity covariance") {
  const Matrix theta = -0.5 * Matrix::Identity(2, 2);
  for (auto method : {LyapunovMethod::schur, LyapunovMethod::kronecker}) {
    const auto cov = solve_continuous(theta, method);
    CHECK((cov.Q - Matrix::Identity(2, 2)).norm() < 1e-12);
  }
}

TEST_CASE("footnote system has covariance I/4") {
  const auto cov = solve_continuous(footnote_theta());
  CHECK((cov.Q - 0.25 * Matrix::Identity(3, 3)).norm() < 1e-10);
  CHECK(cov.residual_norm < 1e-12);
}

TEST_CASE("symmetric Laplacian drift matches the inverse formula") {
  const Matrix theta = gen_laplacian(path3(), 1.0).entries;
  const auto cov = solve_continuous(theta);
  const Matrix expect = -0.5 * theta.inverse();
  CHECK(linalg::relative_frobenius(cov.Q, expect) < 1e-12);
}

TEST_CASE("schur and kronecker agree on non-symmetric drifts") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix theta = gen_sparse_shift(6, 2, 3.0, seed).entries;
    const auto a = solve_continuous(theta, LyapunovMethod::schur);
    const auto b = solve_continuous(theta, LyapunovMethod::kronecker);
    CHECK(linalg::relative_frobenius(a.Q, b.Q) < 1e-10);
    const auto c = solve_discrete(theta, 0.05, LyapunovMethod::schur);
    const auto d = solve_discrete(theta, 0.05, LyapunovMethod::kronecker);
    CHECK(linalg::relative_frobenius(c.Q, d.Q) < 1e-10);
    CHECK(discrete_residual(theta, c.Q, 0.05) / c.Q.norm() < 1e-10);
  }
}

TEST_CASE("scalar Stein equation") {
  const Matrix theta = -0.5 * Matrix::Identity(1, 1);
  const auto cov = solve_discrete(theta, 0.1);
  CHECK(cov.Q(0, 0) == doctest::Approx(1.0 / (1.0 - 0.1 / 4)).epsilon(1e-13));
}

TEST_CASE("discrete covariance approaches the continuous one linearly in eta") {
  const Matrix theta = gen_sparse_shift(5, 2, 3.0, 7).entries;
  const Matrix qc = solve_continuous(theta).Q;
  const double e2 = (solve_discrete(theta, 1e-2).Q - qc).norm();
  const double e3 = (solve_discrete(theta, 1e-3).Q - qc).norm();
  CHECK(e2 / e3 == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("precondition failures") {
  CHECK_THROWS_AS(solve_discrete(Matrix::Zero(2, 2), 0.1), Error);
  CHECK_THROWS_AS(solve_continuous(Matrix::Identity(2, 2)), Error);
  CHECK_THROWS_AS(solve_continuous(Matrix::Zero(2, 3)), Error);
  CHECK_THROWS_AS(solve_discrete(-Matrix::Identity(2, 2), 0.0), Error);
}

TEST_CASE("assumption report on a diagonal drift") {
  const double m = 2.0;
  const Matrix theta = -m * Matrix::Identity(4, 4);
  const auto cov = solve_continuous(theta);
  const auto rep = assumption_report(theta, cov, 1);
  CHECK(rep.support == std::vector<int>{1});
  CHECK(rep.c_min == doctest::Approx(1.0 / (2 * m)));
  CHECK(rep.alpha == doctest::Approx(1.0));
  CHECK(rep.rho_min == doctest::Approx(m));
  CHECK_FALSE(rep.d.has_value());
}

TEST_CASE("Laplacian incoherence bound") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GraphSpec g;
    g.p = 10;
    g.k = 3;
    g.seed = seed;
    const double m = 0.5;
    const Matrix theta = gen_laplacian(g, m).entries;
    const auto cov = solve_continuous(theta);
    for (int r = 0; r < 10; ++r) {
      const auto rep = assumption_report(theta, cov, r);
      CHECK(rep.alpha >= 1.0 - 3.0 / (3.0 + m) - 1e-10);
    }
  }
}

TEST_CASE("discrete report carries D with D*C_min <= 1") {
  const Matrix theta = gen_signed_regular(10, 3, 1.0, 1.0, 3).entries;
  const double eta = 0.1;
  const auto cov = solve_discrete(theta, eta);
  for (int r = 0; r < 10; ++r) {
    const auto rep = assumption_report(theta, cov, r, eta);
    REQUIRE(rep.d.has_value());
    CHECK(*rep.d * rep.c_min <= 1.0 + 1e-12);
    CHECK(std::isfinite(rep.alpha));
  }
}

}  // TEST_SUITE

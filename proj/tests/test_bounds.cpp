#include <doctest.h>

#include "driftrec/bounds.hpp"
#include "driftrec/ensembles.hpp"

#include <cmath>

using namespace driftrec;
using namespace driftrec::bounds;

TEST_SUITE("bounds") {

TEST_CASE("upper bound arithmetic") {
  const auto t1 = ub_sparse_continuous(1, 1, 1, 1, 1, 100, 0.1);
  CHECK(t1.value == doctest::Approx(4e4 * std::log(4000.0)));
  CHECK(t1.value == doctest::Approx(3.3176e5).epsilon(1e-4));
  const auto t4 = ub_discrete(1, 1, 1, 1, 1, 100, 0.1);
  CHECK(t4.value == doctest::Approx(1.6588e5).epsilon(1e-4));
  CHECK(t4.value == doctest::Approx(t1.value / 2));
  CHECK(t1.name == "theorem1");
  CHECK(t1.lambda_at(10.0) == doctest::Approx(std::sqrt(36 * std::log(4000.0) / 10.0)));
}

TEST_CASE("upper bounds move the right way") {
  const auto base = ub_sparse_continuous(3, 1.0, 0.5, 0.5, 0.2, 50, 0.1).value;
  CHECK(ub_sparse_continuous(4, 1.0, 0.5, 0.5, 0.2, 50, 0.1).value > base);
  CHECK(ub_sparse_continuous(3, 2.0, 0.5, 0.5, 0.2, 50, 0.1).value < base);
  CHECK(ub_sparse_continuous(3, 1.0, 0.7, 0.5, 0.2, 50, 0.1).value < base);
  CHECK(ub_sparse_continuous(3, 1.0, 0.5, 0.7, 0.2, 50, 0.1).value < base);
  CHECK(ub_sparse_continuous(3, 1.0, 0.5, 0.5, 0.3, 50, 0.1).value < base);
  CHECK(ub_sparse_continuous(3, 1.0, 0.5, 0.5, 0.2, 60, 0.1).value > base);
  CHECK(ub_sparse_continuous(3, 1.0, 0.5, 0.5, 0.2, 50, 0.05).value > base);
  const auto d = ub_discrete(3, 1.0, 0.5, 0.5, 0.2, 50, 0.1).value;
  CHECK(ub_discrete(3, 1.5, 0.5, 0.5, 0.2, 50, 0.1).value < d);
  CHECK(ub_discrete(3, 1.0, 0.5, 0.5, 0.2, 80, 0.1).value > d);
}

TEST_CASE("Laplacian bound diverges at both ends of m") {
  const double mid = ub_laplacian(3, 1.0, 100, 0.1).value;
  CHECK(ub_laplacian(3, 1e-3, 100, 0.1).value > 1e6 * mid);
  CHECK(ub_laplacian(3, 1e3, 100, 0.1).value > 100 * mid);
  CHECK(ub_laplacian(3, 1.0, 100, 0.1).lambda_at(100.0) > 0.0);
}

TEST_CASE("lower bounds") {
  CHECK(lb_sparse(2, 1, 1, 100).value == doctest::Approx(std::log(100.0)));
  CHECK(lb_sparse(2, 2, 1, 22026).value == doctest::Approx(20.0).epsilon(1e-5));
  CHECK(lb_sparse(2, 1, 1, 100, 3.0).value == doctest::Approx(3 * std::log(100.0)));
  CHECK(lb_sparse(2, 1, 1, 100).up_to_constant);
  CHECK(lb_dense(1, 1, 100).value == 100.0);
  CHECK(lb_dense(2, 1, 50).value == 100.0);
  CHECK(lb_dense(0.1, 0.5, 10).value == doctest::Approx(20.0));
  CHECK(lb_nonlinear(2, 64, 1, 1, 1).value == doctest::Approx(std::log(32.0) / 4));
  CHECK(lb_nonlinear(2, 64, 1, 1, 1).value == doctest::Approx(0.8664).epsilon(1e-4));
  // B = L: only k log(p/k) is left in the numerator
  CHECK(lb_nonlinear(2, 64, 5, 5, 1).value == doctest::Approx(2 * std::log(32.0) / 40));
  CHECK(lb_nonlinear(2, 4, 1e6, 1, 1).vacuous);
  const auto g = lb_generic(10, 1, 2, 0.5);
  CHECK(g.value == doctest::Approx(3.0 / 0.5));
  CHECK(lb_generic(1, 1, 1, 1).vacuous);
}

TEST_CASE("bound argument errors") {
  CHECK_THROWS_AS(ub_sparse_continuous(1, 1, 1, 1.5, 1, 100, 0.1), InvalidArgument);
  CHECK_THROWS_AS(ub_sparse_continuous(1, 1, 1, 1, 1, 100, 1.0), InvalidArgument);
  CHECK_THROWS_AS(ub_discrete(1, 0, 1, 1, 1, 100, 0.1), InvalidArgument);
  CHECK_THROWS_AS(ub_laplacian(1, 0, 100, 0.1), InvalidArgument);
  CHECK_THROWS_AS(lb_nonlinear(2, 64, 0.5, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(lb_generic(1, 1, 1, 0), InvalidArgument);
}

TEST_CASE("denominator MC vanishes for a constant sampler") {
  const Matrix fixed = gen_signed_regular(8, 3, 1.0, 1.0, 2).entries;
  const auto est = lb_generic_denominator_mc([&](std::uint64_t) { return fixed; }, 8, 5, 1);
  CHECK(std::abs(est.value) < 1e-12);
  CHECK(est.standard_error < 1e-12);
}

TEST_CASE("denominator MC is positive for a random ensemble") {
  const auto est = lb_generic_denominator_mc(
      [](std::uint64_t s) { return gen_signed_regular(10, 3, 1.0, 1.0, s).entries; }, 10, 40, 3);
  CHECK(est.value > 0.0);
  CHECK(est.standard_error > 0.0);
}

TEST_CASE("Kesten-McKay closed form") {
  // quadrature (scipy quad and the Gauss-Kronrod path) gives 0.3203772
  CHECK(kesten_mckay_G(3, 4.0) == doctest::Approx(0.3203772).epsilon(1e-6));
  for (int k : {3, 4, 5}) {
    const double z = 1e7;
    CHECK(z * kesten_mckay_G(k, z) == doctest::Approx(1.0).epsilon(1e-6));
    const double edge = 2 * std::sqrt(k - 1.0);
    CHECK(kesten_mckay_G(k, edge * (1 + 1e-14)) ==
          doctest::Approx(std::sqrt(k - 1.0) / (k - 2)).epsilon(1e-6));
  }
  // regular at z = k
  CHECK(std::isfinite(kesten_mckay_G(4, 4.0)));
  CHECK_THROWS_AS(kesten_mckay_G(3, 2.0), InvalidArgument);
  CHECK_THROWS_AS(kesten_mckay_G(2, 5.0), InvalidArgument);
}

TEST_CASE("Kesten-McKay closed form matches quadrature") {
  for (int k : {3, 4, 5}) {
    const double edge = 2 * std::sqrt(k - 1.0);
    for (int i = 0; i < 50; ++i) {
      const double z = edge + 0.1 + (20.0 - edge - 0.1) * i / 49.0;
      if (std::abs(z - k) < 0.05) continue;
      CHECK(std::abs(kesten_mckay_G(k, z) - kesten_mckay_G_numeric(k, z)) < 1e-6);
    }
  }
}

TEST_CASE("Kesten-McKay density integrates to one") {
  // G(k, z)·z → 1 checked above; here a crude midpoint sum
  const int k = 4;
  const double edge = 2 * std::sqrt(3.0);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += kesten_mckay_density(k, -edge + 2 * edge * (i + 0.5) / n);
  CHECK(s * 2 * edge / n == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("sparse denominator") {
  for (int k : {3, 4, 6}) {
    CHECK(denominator_sparse(1.0, k, 0.0) == doctest::Approx(k / std::sqrt(k - 1.0)).epsilon(1e-14));
    // square-root approach to the limit
    CHECK(std::abs(denominator_sparse(1.0, k, 1e-8) - k / std::sqrt(k - 1.0)) < 1e-3);
  }
  double prev = denominator_sparse(1.0, 3, 0.0);
  for (double rho : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double v = denominator_sparse(1.0, 3, rho);
    CHECK(v < prev);
    prev = v;
  }
  const double expect = 1.0 + 2 * std::sqrt(2.0) - 1.0 / kesten_mckay_G(3, 1 + 2 * std::sqrt(2.0));
  CHECK(denominator_sparse(1.0, 3, 1.0) == doctest::Approx(expect));
}

TEST_CASE("Wigner C") {
  CHECK(wigner_C(1.0, 0.0) == 1.0);
  for (double a : {0.3, 1.0, 2.5})
    for (double rho : {0.0, 0.2, 1.0, 4.0})
      CHECK(wigner_C(a, rho) == doctest::Approx(wigner_C(1.0, rho / std::sqrt(a)) / std::sqrt(a)));
  const double theta = std::sqrt(2.0);
  CHECK(denominator_dense(theta, 1.0) == doctest::Approx(3.0 - 1.0 / wigner_C(1.0, 1.0)));
  CHECK(denominator_dense(theta, 0.0) == doctest::Approx(1.0));
  CHECK(denominator_dense(theta, 1e-10) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(denominator_dense(1.0, 0.5) < denominator_dense(1.0, 0.1));
}

TEST_CASE("mean inverse trace of a fixed matrix") {
  const Matrix t = -2.0 * Matrix::Identity(3, 3);
  const auto est = mean_inverse_trace_mc([&](std::uint64_t) { return t; }, 3, 4, 1);
  CHECK(est.value == doctest::Approx(0.5));
}

}  // TEST_SUITE

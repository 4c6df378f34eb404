#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "expcol/errors.hpp"
#include "expcol/matfun.hpp"
#include "oracles.hpp"

using namespace expcol;

namespace {

double rel_err(const Matrix& a, const Matrix& ref) { return max_abs_diff(a, ref) / std::max(1.0, max_abs(ref)); }

}  // namespace

TEST_SUITE("matfun") {
  TEST_CASE("expm of zero, diagonal and rotation generators") {
    CHECK(expm(Matrix(3, 3)) == Matrix::identity(3));
    const Matrix d = expm(Matrix::diagonal(Vector{1.0, -2.0, 0.5}));
    CHECK(d(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(d(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(d(0, 1) == 0.0);
    const double t = 2.7;
    const Matrix r = expm(Matrix{{0.0, t}, {-t, 0.0}});
    CHECK(std::abs(r(0, 0) - std::cos(t)) < 1e-14);
    CHECK(std::abs(r(0, 1) - std::sin(t)) < 1e-14);
    CHECK(std::abs(r(1, 0) + std::sin(t)) < 1e-14);
  }

  TEST_CASE("expm matches Eigen's MatrixExponential across norms") {
    std::mt19937_64 rng(2024);
    for (double scale : {1e-6, 0.01, 0.3, 1.0, 3.0, 10.0, 40.0}) {
      for (std::size_t n : {1u, 2u, 4u, 7u}) {
        CAPTURE(scale);
        CAPTURE(n);
        const Matrix a = oracle::random_matrix(rng, n, scale / static_cast<double>(n));
        CHECK(rel_err(expm(a), oracle::expm(a)) < 1e-12);
      }
    }
  }

  TEST_CASE("expm of a nilpotent Jordan block is the truncated series") {
    const Matrix n{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
    const Matrix e = expm(n);
    CHECK(e(0, 1) == doctest::Approx(1.0));
    CHECK(e(0, 2) == doctest::Approx(0.5));
    CHECK(e(1, 0) == 0.0);
  }

  TEST_CASE("expm rejects non-finite input") {
    Matrix a(2, 2);
    a(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(expm(a), InputError);
  }

  TEST_CASE("scalar phibar: small-argument limits, known values and the integral") {
    for (int k = 0; k <= 6; ++k) {
      double fact = 1.0;
      for (int i = 2; i <= k; ++i) fact *= i;
      CHECK(phi_scalar(0.0, k) == doctest::Approx(1.0 / fact).epsilon(1e-15));
    }
    CHECK(phi_scalar(1.0, 1) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    CHECK(phi_scalar(-30.0, 1) == doctest::Approx((1.0 - std::exp(-30.0)) / 30.0).epsilon(1e-14));
    CHECK(phi_scalar(2.0, 2) == doctest::Approx((std::exp(2.0) - 1.0 - 2.0) / 4.0).epsilon(1e-14));
    for (double z : {-40.0, -5.0, -1.0, -0.999, -0.5, -1e-3, 1e-8, 0.7, 1.0, 3.0, 12.0}) {
      for (int k = 1; k <= 8; ++k) {
        CAPTURE(z);
        CAPTURE(k);
        double fact = 1.0;
        for (int i = 2; i < k; ++i) fact *= i;
        const double ref = oracle::integrate(
            [&](double s) { return std::exp((1.0 - s) * z) * std::pow(s, k - 1) / fact; }, 8);
        CHECK(std::abs(phi_scalar(z, k) - ref) <= 1e-13 * std::max(1.0, std::abs(ref)));
      }
    }
  }

  TEST_CASE("phi_table on symmetric and non-symmetric arguments against quadrature") {
    std::mt19937_64 rng(7);
    for (double scale : {0.05, 1.0, 4.0}) {
      for (bool sym : {true, false}) {
        CAPTURE(scale);
        CAPTURE(sym);
        const Matrix z = sym ? oracle::random_symmetric(rng, 3, scale) : oracle::random_matrix(rng, 3, scale);
        const PhiTable t = phi_table(z, 4);
        REQUIRE(t.values.size() == 5);
        for (int k = 0; k <= 4; ++k) CHECK(rel_err(t[k], oracle::phibar(z, k)) < 1e-12);
      }
    }
  }

  TEST_CASE("phi_table satisfies phibar_k(Z) = Z phibar_{k+1}(Z) + I/k!") {
    std::mt19937_64 rng(8);
    const Matrix z = oracle::random_matrix(rng, 4, 2.0);
    const PhiTable t = phi_table(z, 5);
    double fact = 1.0;
    for (int k = 0; k < 5; ++k) {
      if (k > 1) fact *= k;
      Matrix rhs = z * t[k + 1];
      for (std::size_t i = 0; i < 4; ++i) rhs(i, i) += 1.0 / fact;
      CHECK(rel_err(t[k], rhs) < 1e-12);
    }
  }

  TEST_CASE("stiff diagonal arguments damp without overflow") {
    const PhiTable t = phi_table(Matrix::diagonal(Vector{-1.0, -1e2, -1e4, -1e6}), 3);
    CHECK(t[0](3, 3) == 0.0);
    CHECK(t[1](3, 3) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(t[2](2, 2) == doctest::Approx(1e-4 - 1e-8).epsilon(1e-12));
    CHECK(all_finite(t[3]));
  }

  TEST_CASE("phi_apply and error handling") {
    const Matrix z{{0.0, 1.0}, {-1.0, 0.0}};
    const Vector v{1.0, 2.0};
    const Vector w = phi_apply(z, 1, v);
    const Vector ref = oracle::phibar(z, 1) * v;
    CHECK(max_abs_diff(w, ref) < 1e-14);
    CHECK_THROWS_AS(phi_table(z, -1), InputError);
    CHECK_THROWS_AS(phi_table(Matrix(2, 3), 1), InputError);
  }
}

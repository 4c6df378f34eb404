#include <doctest.h>

#include <cmath>

#include "expcol/basis.hpp"
#include "expcol/errors.hpp"
#include "oracles.hpp"

using namespace expcol;

TEST_SUITE("basis") {
  TEST_CASE("Legendre basis matches the recurrence and is orthonormal on [0,1]") {
    for (int r : {1, 2, 3, 5, 8, 12}) {
      const OrthonormalBasis b = legendre_basis(r);
      REQUIRE(b.size() == r);
      for (int i = 0; i < r; ++i) {
        for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
          CHECK(std::abs(b(i, t) - oracle::legendre(i, t)) < 1e-9 * std::max(1.0, std::abs(oracle::legendre(i, t))));
        }
        for (int j = 0; j < r; ++j) {
          const double ip = oracle::integrate([&](double t) { return b(i, t) * b(j, t); }, 4);
          CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-9);
        }
      }
    }
  }

  TEST_CASE("first two basis functions") {
    const OrthonormalBasis b = legendre_basis(2);
    CHECK(b(0, 0.3) == doctest::Approx(1.0));
    CHECK(b(1, 0.0) == doctest::Approx(-std::sqrt(3.0)));
    CHECK(b(1, 1.0) == doctest::Approx(std::sqrt(3.0)));
  }

  TEST_CASE("order limits") {
    CHECK_THROWS_AS(legendre_basis(0), InputError);
    CHECK_THROWS_AS(legendre_basis(kMaxBasisOrder + 1), InputError);
    CHECK_THROWS_AS(gauss_rule(0), InputError);
  }

  TEST_CASE("Gauss rule agrees with Golub-Welsch and integrates degree 2r-1 exactly") {
    for (int r = 1; r <= kMaxBasisOrder; ++r) {
      CAPTURE(r);
      const QuadratureRule q = gauss_rule(r);
      const auto [nodes, weights] = oracle::gauss(r);
      for (int i = 0; i < r; ++i) {
        CHECK(std::abs(q.nodes[i] - nodes[i]) < 1e-14);
        CHECK(std::abs(q.weights[i] - weights[i]) < 1e-14);
      }
      for (int k = 0; k < 2 * r; ++k) {
        double s = 0.0;
        for (int i = 0; i < r; ++i) s += q.weights[i] * std::pow(q.nodes[i], k);
        CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
      }
      for (int i = 0; i < r; ++i) CHECK(std::abs(q.nodes[i] + q.nodes[r - 1 - i] - 1.0) < 1e-15);
    }
    CHECK(gauss_rule(3).nodes[1] == 0.5);
  }

  TEST_CASE("projection kernel reproduces polynomials of degree < r") {
    const int r = 4;
    const OrthonormalBasis b = legendre_basis(r);
    auto poly = [](double s) { return 1.0 - 2.0 * s + 3.0 * s * s * s; };
    for (double tau : {0.0, 0.3, 0.9}) {
      const double proj = oracle::integrate([&](double s) { return projection_kernel(b, tau, s) * poly(s); }, 2);
      CHECK(proj == doctest::Approx(poly(tau)).epsilon(1e-12));
    }
  }

  TEST_CASE("Lagrange weights are cardinal and reproduce polynomials") {
    const QuadratureRule q = gauss_rule(3);
    for (int j = 0; j < 3; ++j) {
      const Vector w = lagrange_weights(q, q.nodes[j]);
      for (int m = 0; m < 3; ++m) CHECK(w[m] == doctest::Approx(m == j ? 1.0 : 0.0));
    }
    const Vector w = lagrange_weights(q, 0.9);
    double s = 0.0;
    for (int m = 0; m < 3; ++m) s += w[m] * (q.nodes[m] * q.nodes[m]);
    CHECK(s == doctest::Approx(0.81).epsilon(1e-14));
    const Vector dup{0.2, 0.2};
    CHECK_THROWS_AS(lagrange_weights(dup, 0.5), InputError);
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "expcol/ecr.hpp"
#include "expcol/errors.hpp"
#include "expcol/problems.hpp"
#include "expcol/reference.hpp"

using namespace expcol;

TEST_SUITE("problems") {
  TEST_CASE("duffing: energy, structure and k = 0 limit") {
    const ProblemInstance p = duffing(5.0, 0.07);
    CHECK(p.system.eval_energy(p.initial_state) == doctest::Approx(12.5).epsilon(1e-15));
    CHECK(p.system.classification == Classification::conservative);
    CHECK(p.exact(0.0) == Vector{0.0, 5.0});
    CHECK(p.reference == ReferenceKind::elliptic);
    const Matrix a = p.system.a;
    CHECK(a(1, 0) == doctest::Approx(-25.0049));
    const Vector g = p.system.eval_g(Vector{0.5, 0.0});
    CHECK(g[1] == doctest::Approx(2.0 * 0.0049 * 0.125));

    const ProblemInstance lin = duffing(5.0, 0.0);
    for (double t : {0.1, 1.0, 7.3}) CHECK(lin.exact(t)[0] == doctest::Approx(std::sin(5.0 * t)).epsilon(1e-14));
    CHECK_THROWS_AS(duffing(5.0, 5.0), InputError);
    CHECK_THROWS_AS(duffing(-1.0, 0.0), InputError);
  }

  TEST_CASE("duffing: elliptic solution agrees with an adaptive reference integration") {
    for (double omega : {5.0, 10.0}) {
      const ProblemInstance p = duffing(omega, 0.07);
      for (double t : {1.0, 3.7, 10.0}) {
        CAPTURE(omega);
        CAPTURE(t);
        const Vector ref = reference_solution(p.system, p.initial_state, t, 1e-13);
        CHECK(max_abs_diff(ref, p.exact(t)) < 1e-10);
      }
    }
  }

  TEST_CASE("duffing second-order form matches the first-order system") {
    const ProblemInstance p = duffing(5.0, 0.07);
    const SecondOrderSystem& so = *p.second_order;
    CHECK(so.omega(0, 0) == doctest::Approx(25.0049));
    const Vector q{0.4}, v{1.3};
    CHECK(so.energy(q, v) == doctest::Approx(p.system.eval_energy(Vector{0.4, 1.3})).epsilon(1e-15));
  }

  TEST_CASE("wind: classification, Q and H") {
    const double half_pi = std::numbers::pi / 2;
    const ProblemInstance c = wind(half_pi, 20.0);
    CHECK(c.system.classification == Classification::conservative);
    const Matrix& q = c.system.structure->q;
    CHECK(q(0, 0) == 0.0);
    CHECK(q(0, 1) == -1.0);
    CHECK(q(1, 0) == 1.0);
    // at theta = pi/2 the x2^3/3 term carries cos(theta) = 0
    CHECK(c.system.eval_energy(c.initial_state) == doctest::Approx(10.0).epsilon(1e-15));

    const double theta = half_pi - 1e-4;
    const ProblemInstance d = wind(theta, 20.0);
    CHECK(d.system.classification == Classification::dissipative);
    const Matrix& qd = d.system.structure->q;
    const Matrix sym = qd + transpose(qd);
    CHECK(sym(0, 0) == doctest::Approx(-2.0 * std::cos(theta)));
    CHECK(sym(0, 1) == 0.0);
    CHECK(d.system.eval_energy(d.initial_state) == doctest::Approx(10.0 + std::cos(theta) / 6.0).epsilon(1e-15));

    // g reproduces the original averaged system
    const Vector x{0.3, -0.8};
    const Vector g = d.system.eval_g(x);
    CHECK(g[0] == doctest::Approx(x[0] * x[1]));
    CHECK(g[1] == doctest::Approx(0.5 * (x[0] * x[0] - x[1] * x[1])));
    CHECK_THROWS_AS(wind(2.0, 20.0), InputError);
    CHECK_THROWS_AS(wind(-0.1, 20.0), InputError);
    CHECK_THROWS_AS(wind(1.0, -1.0), InputError);
  }

  TEST_CASE("pseudospectral D2") {
    const int n = 32;
    const double length = 4.0 * std::sqrt(2.0) * std::numbers::pi;
    const double mu = 2.0 * std::numbers::pi / length;
    const Matrix d2 = pseudospectral_d2(n, length);
    CHECK(d2(3, 3) == doctest::Approx(-mu * mu * (2.0 * 16.0 * 16.0 + 1.0) / 6.0).epsilon(1e-15));
    CHECK(is_symmetric(d2, 0.0));
    const Vector ones(n, 1.0);
    CHECK(norm_inf(d2 * ones) < 1e-10);
    // exact on the lowest Fourier mode: D2 cos(mu x) = -mu^2 cos(mu x)
    Vector c(n);
    for (int j = 0; j < n; ++j) c[j] = std::cos(mu * j * length / n);
    const Vector dc = d2 * c;
    for (int j = 0; j < n; ++j) CHECK(dc[j] == doctest::Approx(-mu * mu * c[j]).epsilon(1e-10).scale(1.0));
    CHECK_THROWS_AS(pseudospectral_d2(31, length), InputError);
  }

  TEST_CASE("nls: initial state, energy and translation invariance") {
    const ProblemInstance p = nls_semidiscrete(32);
    CHECK(p.system.dimension() == 64);
    CHECK(p.initial_state[0] == doctest::Approx(0.525));
    CHECK(p.initial_state[40] == 0.0);
    CHECK(p.system.classification == Classification::conservative);
    Vector y = p.initial_state;
    for (int j = 0; j < 32; ++j) y[32 + j] = 0.1 * std::sin(0.3 * j * j);
    Vector shifted(64);
    for (int j = 0; j < 32; ++j) {
      shifted[(j + 5) % 32] = y[j];
      shifted[32 + (j + 5) % 32] = y[32 + j];
    }
    CHECK(std::abs(p.system.eval_energy(y) - p.system.eval_energy(shifted)) < 1e-10);
    CHECK_THROWS_AS(nls_semidiscrete(33), InputError);
    CHECK_THROWS_AS(nls_semidiscrete(6), InputError);
  }

  TEST_CASE("stiff gradient: exact damping with V = 0") {
    const Vector spectrum{1.0, 1e2, 1e4, 1e6};
    const ProblemInstance p = stiff_gradient(spectrum, GradientPotential::zero);
    CHECK(p.system.classification == Classification::gradient);
    const auto scheme = CollocationScheme::make(2, 1.0);
    const StepResult st = step(p.system, scheme, build_coefficients(p.system, scheme), p.initial_state);
    const Vector exact = p.exact(1.0);
    CHECK(max_abs_diff(st.y1, exact) < 1e-12);
    CHECK(std::abs(st.y1[3]) <= 1e-10 * std::abs(p.initial_state[3]));
    CHECK_THROWS_AS(stiff_gradient(Vector{1.0, -1.0}, GradientPotential::zero), InputError);
  }

  TEST_CASE("stiff gradient: quartic potential decays monotonically") {
    const ProblemInstance p = stiff_gradient(Vector{1.0, 2.0, 5.0}, GradientPotential::quartic);
    const auto scheme = CollocationScheme::make(2, 0.1);
    const RunResult res = integrate(p.system, scheme, p.initial_state, 20.0);
    REQUIRE(res.steps() == 200);
    for (std::size_t n = 1; n < res.energies.size(); ++n) CHECK(res.energies[n] <= res.energies[n - 1] + 1e-10);
  }

  TEST_CASE("catalog") {
    CHECK(problem_names().size() == 4);
    for (const auto& name : problem_names()) {
      CAPTURE(name);
      const ProblemInstance p = make_problem(name);
      CHECK(p.name == name);
      CHECK(p.initial_state.size() == p.system.dimension());
      if (p.has_exact()) CHECK(max_abs_diff(p.exact(0.0), p.initial_state) < 1e-15);
    }
    CHECK(make_problem("duffing", {{"omega", 10.0}}).parameters.at("omega") == 10.0);
    CHECK(make_problem("stiff-gradient", {}, Vector{3.0}).system.dimension() == 1);
    CHECK_THROWS_AS(make_problem("nope"), InputError);
    CHECK_THROWS_AS(make_problem("duffing", {{"theta", 1.0}}), InputError);
    CHECK_THROWS_AS(make_problem("nls", {{"n", 10.5}}), InputError);
    CHECK_THROWS_AS(make_problem("wind", {}, Vector{1.0}), InputError);
  }
}

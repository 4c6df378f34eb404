#include "expcol/reference.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "expcol/errors.hpp"

namespace expcol {

namespace {

void rhs(const SemilinearSystem& system, std::span<const double> y, std::span<double> out) {
  system.eval_g(y, out);
  multiply_add(system.a, y, out, 1.0, 1.0);
}

}  // namespace

Vector reference_solution(const SemilinearSystem& system, std::span<const double> y0, double t_end, double tol) {
  namespace odeint = boost::numeric::odeint;
  if (y0.size() != system.dimension()) throw InputError("reference_solution: dimension mismatch");
  if (!(t_end >= 0.0)) throw InputError("reference_solution: T must be >= 0");
  if (!(tol > 0.0)) throw InputError("reference_solution: tolerance must be positive");
  Vector y(y0.begin(), y0.end());
  if (t_end == 0.0) return y;
  auto f = [&system](const Vector& x, Vector& dxdt, double) { rhs(system, x, dxdt); };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<Vector>());
  odeint::integrate_adaptive(stepper, f, y, 0.0, t_end, t_end * 1e-3);
  if (!all_finite(y)) throw NumericError("reference_solution: non-finite result");
  return y;
}

RunResult baseline_rk4(const SemilinearSystem& system, std::span<const double> y0, double h, double t_end) {
  if (y0.size() != system.dimension()) throw InputError("baseline_rk4: dimension mismatch");
  if (!(h > 0.0)) throw InputError("baseline_rk4: h must be positive");
  const std::size_t n = step_count(t_end, h);
  const std::size_t d = y0.size();
  const double scale = norm_inf(y0);

  RunResult res;
  res.times.push_back(0.0);
  res.states.emplace_back(y0.begin(), y0.end());
  if (system.has_energy()) res.energies.push_back(system.energy(y0));

  Vector k1(d), k2(d), k3(d), k4(d), tmp(d);
  for (std::size_t s = 0; s < n; ++s) {
    const double t = static_cast<double>(s) * h;
    const double hs = (s + 1 == n) ? t_end - t : h;
    const Vector& y = res.states.back();
    rhs(system, y, k1);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * hs * k1[i];
    rhs(system, tmp, k2);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * hs * k2[i];
    rhs(system, tmp, k3);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + hs * k3[i];
    rhs(system, tmp, k4);
    Vector next(d);
    for (std::size_t i = 0; i < d; ++i) next[i] = y[i] + hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!state_is_sane(next, scale)) throw NumericBlowup("baseline-rk4: state blew up", std::move(res), s);
    res.iterations.push_back(0);
    res.residuals.push_back(0.0);
    res.converged.push_back(1);
    res.times.push_back(s + 1 == n ? t_end : static_cast<double>(s + 1) * h);
    if (system.has_energy()) res.energies.push_back(system.energy(next));
    res.states.push_back(std::move(next));
  }
  return res;
}

}  // namespace expcol

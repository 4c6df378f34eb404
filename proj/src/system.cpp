#include "expcol/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "expcol/errors.hpp"

namespace expcol {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::conservative:
      return "conservative";
    case Classification::dissipative:
      return "dissipative";
    case Classification::gradient:
      return "gradient";
    case Classification::generic:
      return "generic";
  }
  return "generic";
}

Vector SemilinearSystem::eval_g(std::span<const double> y) const {
  Vector out(y.size(), 0.0);
  eval_g(y, out);
  return out;
}

void SemilinearSystem::eval_g(std::span<const double> y, std::span<double> out) const {
  if (y.size() != dimension() || out.size() != dimension()) throw InputError("eval_g: dimension mismatch");
  if (g) {
    g(y, out);
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
}

double SemilinearSystem::eval_energy(std::span<const double> y) const {
  if (!energy) throw InputError("system has no energy function");
  return energy(y);
}

SemilinearSystem make_structured_system(Matrix q, Matrix m, ScalarField v, VectorField grad_v,
                                        Classification classification, ScalarField energy) {
  if (!q.square() || !m.square() || q.rows() != m.rows()) {
    throw InputError("make_structured_system: Q and M must be square of equal size");
  }
  SemilinearSystem sys;
  sys.a = q * m;
  sys.classification = classification;
  const std::size_t d = q.rows();
  if (grad_v) {
    sys.g = [q, grad_v, d](std::span<const double> y, std::span<double> out) {
      Vector gv(d);
      grad_v(y, gv);
      multiply_add(q, gv, out, 1.0, 0.0);
    };
  }
  if (energy) {
    sys.energy = std::move(energy);
  } else {
    sys.energy = [m, v](std::span<const double> y) {
      const Vector my = m * y;
      double quad = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) quad += y[i] * my[i];
      return 0.5 * quad + (v ? v(y) : 0.0);
    };
  }
  sys.structure = Structure{std::move(q), std::move(m), std::move(v), std::move(grad_v)};
  return sys;
}

SemilinearSystem make_linear_system(Matrix a) {
  if (!a.square()) throw InputError("make_linear_system: A must be square");
  SemilinearSystem sys;
  sys.a = std::move(a);
  return sys;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw InputError("structure check failed: " + msg); }

Vector central_difference_gradient(const ScalarField& f, std::span<const double> y) {
  Vector grad(y.size());
  Vector yp(y.begin(), y.end());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double step = 1e-5 * std::max(1.0, std::abs(y[i]));
    const double saved = yp[i];
    yp[i] = saved + step;
    const double fp = f(yp);
    yp[i] = saved - step;
    const double fm = f(yp);
    yp[i] = saved;
    grad[i] = (fp - fm) / (2.0 * step);
  }
  return grad;
}

void check_gradient(const ScalarField& f, const VectorField& grad, std::span<const double> y,
                    const char* name) {
  Vector analytic(y.size(), 0.0);
  grad(y, analytic);
  const Vector fd = central_difference_gradient(f, y);
  const double scale = std::max(1.0, norm_inf(analytic));
  if (max_abs_diff(analytic, fd) > 1e-6 * scale) {
    std::ostringstream os;
    os << name << " disagrees with finite differences of its potential (diff "
       << max_abs_diff(analytic, fd) << ")";
    fail(os.str());
  }
}

}  // namespace

void validate_structure(const SemilinearSystem& system, std::span<const Vector> samples) {
  if (!system.structure) return;
  const Structure& s = *system.structure;
  const std::size_t d = system.dimension();
  if (s.q.rows() != d || s.m.rows() != d) fail("Q/M dimension differs from A");

  const double a_scale = std::max(1.0, max_abs(system.a));
  if (max_abs_diff(system.a, s.q * s.m) > 1e-12 * a_scale) fail("A != Q M");
  if (!is_symmetric(s.m, 1e-12 * std::max(1.0, max_abs(s.m)))) fail("M is not symmetric");

  const double q_scale = std::max(1.0, max_abs(s.q));
  switch (system.classification) {
    case Classification::conservative:
      if (max_abs_diff(s.q, -1.0 * transpose(s.q)) > 1e-12 * q_scale) fail("conservative system needs skew-symmetric Q");
      break;
    case Classification::dissipative: {
      const auto eig = symmetric_eigen(s.q);
      if (eig.values.back() > 1e-12 * q_scale) fail("dissipative system needs negative semidefinite Q");
      break;
    }
    case Classification::gradient:
      if (max_abs_diff(s.q, -1.0 * Matrix::identity(d)) > 0.0) fail("gradient system uses Q = -I");
      break;
    case Classification::generic:
      break;
  }

  for (const Vector& y : samples) {
    if (y.size() != d) fail("sample state has wrong dimension");
    Vector gv(d, 0.0);
    if (s.grad_v) s.grad_v(y, gv);
    const Vector qgv = s.q * gv;
    const Vector g = system.eval_g(y);
    if (max_abs_diff(g, qgv) > 1e-10 * std::max(1.0, norm_inf(g))) fail("g != Q grad V");

    if (s.v && s.grad_v) check_gradient(s.v, s.grad_v, y, "grad V");

    if (system.energy) {
      const Vector my = s.m * y;
      double quad = 0.0;
      for (std::size_t i = 0; i < d; ++i) quad += y[i] * my[i];
      const double expected = 0.5 * quad + (s.v ? s.v(y) : 0.0);
      const double h = system.energy(y);
      if (std::abs(h - expected) > 1e-10 * std::max(1.0, std::abs(expected))) fail("H != 1/2 y^T M y + V");
    }
  }
}

bool SecondOrderSystem::undamped() const { return !damping || max_abs(*damping) == 0.0; }

Vector SecondOrderSystem::eval_grad_u(std::span<const double> q) const {
  Vector out(q.size(), 0.0);
  eval_grad_u(q, out);
  return out;
}

void SecondOrderSystem::eval_grad_u(std::span<const double> q, std::span<double> out) const {
  if (q.size() != dimension() || out.size() != dimension()) throw InputError("eval_grad_u: dimension mismatch");
  if (grad_u) {
    grad_u(q, out);
  } else {
    std::fill(out.begin(), out.end(), 0.0);
  }
}

double SecondOrderSystem::energy(std::span<const double> q, std::span<const double> p) const {
  if (q.size() != dimension() || p.size() != dimension()) throw InputError("energy: dimension mismatch");
  const Vector oq = omega * q;
  double e = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) e += 0.5 * p[i] * p[i] + 0.5 * q[i] * oq[i];
  return e + (u ? u(q) : 0.0);
}

void validate_second_order(const SecondOrderSystem& system, std::span<const Vector> samples) {
  const std::size_t d = system.dimension();
  if (!system.omega.square()) fail("Omega must be square");
  if (!system.multi_frequency && !is_symmetric(system.omega, 1e-12 * std::max(1.0, max_abs(system.omega)))) {
    fail("Omega is not symmetric");
  }
  if (system.damping) {
    const Matrix& n = *system.damping;
    if (n.rows() != d || !n.square()) fail("N has wrong dimension");
    if (!is_symmetric(n, 1e-12 * std::max(1.0, max_abs(n)))) fail("N is not symmetric");
    if (symmetric_eigen(n).values.back() > 1e-12 * std::max(1.0, max_abs(n))) fail("N is not negative semidefinite");
  }
  for (const Vector& q : samples) {
    if (q.size() != d) fail("sample has wrong dimension");
    if (system.u && system.grad_u) check_gradient(system.u, system.grad_u, q, "grad U");
  }
}

SemilinearSystem to_first_order(const SecondOrderSystem& system) {
  const std::size_t d = system.dimension();
  Matrix q(2 * d, 2 * d);
  Matrix m(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    q(i, d + i) = 1.0;
    q(d + i, i) = -1.0;
    m(d + i, d + i) = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      m(i, j) = system.omega(i, j);
      if (system.damping) q(d + i, d + j) = (*system.damping)(i, j);
    }
  }
  ScalarField v;
  VectorField grad_v;
  if (system.u) {
    v = [u = system.u, d](std::span<const double> y) { return u(y.first(d)); };
  }
  if (system.grad_u) {
    grad_v = [gu = system.grad_u, d](std::span<const double> y, std::span<double> out) {
      gu(y.first(d), out.first(d));
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(d), out.end(), 0.0);
    };
  }
  ScalarField energy = [system](std::span<const double> y) {
    const std::size_t n = system.dimension();
    return system.energy(y.first(n), y.subspan(n, n));
  };
  const Classification c = system.undamped() ? Classification::conservative : Classification::dissipative;
  SemilinearSystem out = make_structured_system(std::move(q), std::move(m), std::move(v), std::move(grad_v), c,
                                                std::move(energy));
  if (system.multi_frequency) out.classification = Classification::generic;
  return out;
}

SecondOrderSystem absorb_stiffness(const SecondOrderSystem& system) {
  SecondOrderSystem out;
  const std::size_t d = system.dimension();
  out.omega = Matrix(d, d);
  out.damping = system.damping;
  out.multi_frequency = false;
  out.grad_u = [omega = system.omega, gu = system.grad_u, d](std::span<const double> q, std::span<double> res) {
    multiply_add(omega, q, res, 1.0, 0.0);
    if (gu) {
      Vector extra(d, 0.0);
      gu(q, extra);
      for (std::size_t i = 0; i < d; ++i) res[i] += extra[i];
    }
  };
  out.u = [omega = system.omega, u = system.u](std::span<const double> q) {
    const Vector oq = omega * q;
    double e = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) e += 0.5 * q[i] * oq[i];
    return e + (u ? u(q) : 0.0);
  };
  return out;
}

std::size_t RunResult::nonconverged_steps() const {
  return static_cast<std::size_t>(std::count(converged.begin(), converged.end(), std::uint8_t{0}));
}

bool state_is_sane(std::span<const double> y, double scale) {
  const double limit = 1e100 * std::max(1.0, scale);
  return std::all_of(y.begin(), y.end(), [limit](double v) { return std::isfinite(v) && std::abs(v) <= limit; });
}

std::size_t step_count(double t_end, double h) {
  if (!(t_end > 0.0) || !(h > 0.0)) throw InputError("step_count: T and h must be positive");
  const double ratio = t_end / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio)) return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(ratio));
}

}  // namespace expcol

#include "expcol/problems.hpp"

#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <cmath>
#include <numbers>

#include "expcol/errors.hpp"

namespace expcol {

std::string_view to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::closed_form:
      return "closed-form";
    case ReferenceKind::elliptic:
      return "elliptic";
    case ReferenceKind::self_convergence:
      return "self-convergence";
  }
  return "self-convergence";
}

namespace {

// Deterministic sample states around y0 for the construction-time checks.
std::vector<Vector> probe_states(const Vector& y0) {
  std::vector<Vector> out{y0};
  Vector a = y0;
  Vector b = y0;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    a[i] += 0.1 * std::sin(1.0 + static_cast<double>(i));
    b[i] -= 0.2 * std::cos(0.5 + 0.7 * static_cast<double>(i));
  }
  out.push_back(std::move(a));
  out.push_back(std::move(b));
  return out;
}

}  // namespace

ProblemInstance duffing(double omega, double k) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InputError("duffing: omega must be positive");
  if (!(k >= 0.0) || !(k < omega)) throw InputError("duffing: need 0 <= k < omega (elliptic modulus k/omega < 1)");
  const double stiff = omega * omega + k * k;
  const double k2 = k * k;

  ProblemInstance p;
  p.name = "duffing";
  p.parameters = {{"omega", omega}, {"k", k}};
  ScalarField v = [k2](std::span<const double> y) { return -0.5 * k2 * std::pow(y[0], 4); };
  VectorField gv = [k2](std::span<const double> y, std::span<double> out) {
    out[0] = -2.0 * k2 * y[0] * y[0] * y[0];
    out[1] = 0.0;
  };
  p.system = make_structured_system(Matrix{{0.0, 1.0}, {-1.0, 0.0}}, Matrix{{stiff, 0.0}, {0.0, 1.0}}, v, gv,
                                    Classification::conservative);

  SecondOrderSystem so;
  so.omega = Matrix{{stiff}};
  so.u = [k2](std::span<const double> q) { return -0.5 * k2 * std::pow(q[0], 4); };
  so.grad_u = [k2](std::span<const double> q, std::span<double> out) { out[0] = -2.0 * k2 * q[0] * q[0] * q[0]; };
  p.second_order = so;

  p.initial_state = {0.0, omega};
  p.reference = k == 0.0 ? ReferenceKind::closed_form : ReferenceKind::elliptic;
  const double modulus = k / omega;
  p.exact = [omega, modulus](double t) {
    double cn = 0.0;
    double dn = 0.0;
    const double sn = boost::math::jacobi_elliptic(modulus, omega * t, &cn, &dn);
    return Vector{sn, omega * cn * dn};
  };
  validate_structure(p.system, probe_states(p.initial_state));
  validate_second_order(*p.second_order, std::vector<Vector>{{0.0}, {0.3}, {-0.8}});
  return p;
}

ProblemInstance wind(double theta, double rho) {
  if (!(theta >= 0.0) || !(theta <= std::numbers::pi / 2)) throw InputError("wind: theta must lie in [0, pi/2]");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InputError("wind: rho must be >= 0");
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  ProblemInstance p;
  p.name = "wind";
  p.parameters = {{"theta", theta}, {"rho", rho}};
  ScalarField v = [c, s](std::span<const double> x) {
    const double x1 = x[0];
    const double x2 = x[1];
    return -0.5 * s * (x1 * x2 * x2 - x1 * x1 * x1 / 3.0) + 0.5 * c * (-x1 * x1 * x2 + x2 * x2 * x2 / 3.0);
  };
  VectorField gv = [c, s](std::span<const double> x, std::span<double> out) {
    const double x1 = x[0];
    const double x2 = x[1];
    out[0] = 0.5 * s * (x1 * x1 - x2 * x2) - c * x1 * x2;
    out[1] = -s * x1 * x2 + 0.5 * c * (x2 * x2 - x1 * x1);
  };
  // cos(pi/2) is 6e-17 in floating point; the conservative case uses the exact skew Q.
  const bool conservative = theta == std::numbers::pi / 2;
  const double qc = conservative ? 0.0 : c;
  p.system = make_structured_system(Matrix{{-qc, -s}, {s, -qc}}, Matrix{{rho, 0.0}, {0.0, rho}}, v, gv,
                                    conservative ? Classification::conservative : Classification::dissipative);
  p.initial_state = {0.0, 1.0};
  p.reference = ReferenceKind::self_convergence;
  validate_structure(p.system, probe_states(p.initial_state));
  return p;
}

Matrix pseudospectral_d2(int n, double length) {
  if (n < 8 || n % 2 != 0) throw InputError("pseudospectral_d2: N must be even and >= 8");
  if (!(length > 0.0)) throw InputError("pseudospectral_d2: L must be positive");
  const double mu = 2.0 * std::numbers::pi / length;
  const auto un = static_cast<std::size_t>(n);
  Matrix d2(un, un);
  const double half = n / 2.0;
  for (std::size_t j = 0; j < un; ++j) {
    for (std::size_t k = 0; k < un; ++k) {
      if (j == k) {
        d2(j, k) = -mu * mu * (2.0 * half * half + 1.0) / 6.0;
      } else {
        const double dx = (static_cast<double>(j) - static_cast<double>(k)) * length / n;
        const double sn = std::sin(mu * dx / 2.0);
        const double sign = ((j + k + 1) % 2 == 0) ? 1.0 : -1.0;
        d2(j, k) = 0.5 * mu * mu * sign / (sn * sn);
      }
    }
  }
  return d2;
}

ProblemInstance nls_semidiscrete(int n) {
  if (n < 8 || n % 2 != 0) throw InputError("nls: N must be even and >= 8");
  const double length = 4.0 * std::sqrt(2.0) * std::numbers::pi;
  const double mu = 2.0 * std::numbers::pi / length;
  const Matrix d2 = pseudospectral_d2(n, length);
  const auto un = static_cast<std::size_t>(n);

  Matrix q(2 * un, 2 * un);
  Matrix m(2 * un, 2 * un);
  for (std::size_t i = 0; i < un; ++i) {
    q(i, un + i) = -1.0;
    q(un + i, i) = 1.0;
    for (std::size_t j = 0; j < un; ++j) {
      m(i, j) = d2(i, j);
      m(un + i, un + j) = d2(i, j);
    }
  }
  ScalarField v = [un](std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < un; ++i) {
      const double rho = y[i] * y[i] + y[un + i] * y[un + i];
      s += rho * rho;
    }
    return 0.5 * s;
  };
  VectorField gv = [un](std::span<const double> y, std::span<double> out) {
    for (std::size_t i = 0; i < un; ++i) {
      const double rho = y[i] * y[i] + y[un + i] * y[un + i];
      out[i] = 2.0 * rho * y[i];
      out[un + i] = 2.0 * rho * y[un + i];
    }
  };

  ProblemInstance p;
  p.name = "nls";
  p.parameters = {{"n", static_cast<double>(n)}};
  p.system = make_structured_system(std::move(q), std::move(m), v, gv, Classification::conservative);
  p.initial_state.assign(2 * un, 0.0);
  for (std::size_t j = 0; j < un; ++j) {
    const double x = static_cast<double>(j) * length / n;
    p.initial_state[j] = 0.5 + 0.025 * std::cos(mu * x);
  }
  p.reference = ReferenceKind::self_convergence;
  validate_structure(p.system, probe_states(p.initial_state));
  return p;
}

ProblemInstance stiff_gradient(const Vector& spectrum, GradientPotential potential) {
  if (spectrum.empty()) throw InputError("stiff-gradient: spectrum must not be empty");
  for (double s : spectrum) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InputError("stiff-gradient: spectrum entries must be >= 0");
  }
  const std::size_t d = spectrum.size();
  ScalarField v;
  VectorField gv;
  if (potential == GradientPotential::quartic) {
    v = [](std::span<const double> y) {
      double s = 0.0;
      for (double x : y) s += (x * x - 1.0) * (x * x - 1.0);
      return 0.25 * s;
    };
    gv = [](std::span<const double> y, std::span<double> out) {
      for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] * (y[i] * y[i] - 1.0);
    };
  }
  ProblemInstance p;
  p.name = "stiff-gradient";
  p.parameters = {{"quartic", potential == GradientPotential::quartic ? 1.0 : 0.0}};
  p.system = make_structured_system(-1.0 * Matrix::identity(d), Matrix::diagonal(spectrum), v, gv,
                                    Classification::gradient);
  p.initial_state.assign(d, 0.5);
  if (potential == GradientPotential::zero) {
    p.reference = ReferenceKind::closed_form;
    p.exact = [spectrum, y0 = p.initial_state](double t) {
      Vector y(y0.size());
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::exp(-t * spectrum[i]) * y0[i];
      return y;
    };
  } else {
    p.reference = ReferenceKind::self_convergence;
  }
  validate_structure(p.system, probe_states(p.initial_state));
  return p;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"duffing", "wind", "nls", "stiff-gradient"};
  return names;
}

ParameterRecord default_parameters(const std::string& name) {
  if (name == "duffing") return {{"omega", 5.0}, {"k", 0.07}};
  if (name == "wind") return {{"theta", std::numbers::pi / 2}, {"rho", 20.0}};
  if (name == "nls") return {{"n", 32.0}};
  if (name == "stiff-gradient") return {{"quartic", 0.0}};
  throw InputError("unknown problem '" + name + "'");
}

ProblemInstance make_problem(const std::string& name, const ParameterRecord& overrides,
                             const std::optional<Vector>& spectrum) {
  ParameterRecord params = default_parameters(name);
  for (const auto& [key, value] : overrides) {
    auto it = params.find(key);
    if (it == params.end()) throw InputError("problem '" + name + "' has no parameter '" + key + "'");
    it->second = value;
  }
  if (spectrum && name != "stiff-gradient") throw InputError("spectrum applies to stiff-gradient only");
  if (name == "duffing") return duffing(params["omega"], params["k"]);
  if (name == "wind") return wind(params["theta"], params["rho"]);
  if (name == "nls") {
    const double n = params["n"];
    if (n != std::round(n)) throw InputError("nls: N must be an integer");
    return nls_semidiscrete(static_cast<int>(n));
  }
  const double quartic = params["quartic"];
  if (quartic != 0.0 && quartic != 1.0) throw InputError("stiff-gradient: quartic must be 0 or 1");
  const Vector spec = spectrum.value_or(Vector{1.0, 1e2, 1e4, 1e6});
  return stiff_gradient(spec, quartic == 1.0 ? GradientPotential::quartic : GradientPotential::zero);
}

}  // namespace expcol

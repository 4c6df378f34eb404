#include "expcol/ecr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "expcol/errors.hpp"

namespace expcol {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// w_k(sigma) = sum_i a_ik p_i(sigma): the sigma-dependent weight of the tau^k term.
Vector monomial_weights(const OrthonormalBasis& basis, double sigma) {
  const int r = basis.size();
  Vector w(static_cast<std::size_t>(r), 0.0);
  const Vector p = basis.evaluate(sigma);
  for (int i = 0; i < r; ++i) {
    const Vector& a = basis.coefficients(i);
    for (std::size_t k = 0; k < a.size(); ++k) w[k] += a[k] * p[static_cast<std::size_t>(i)];
  }
  return w;
}

double stage_scale(const std::vector<Vector>& stages) {
  double s = 1.0;
  for (const auto& y : stages) s = std::max(s, norm_inf(y));
  return s;
}

}  // namespace

CollocationScheme CollocationScheme::make(int r, double h) {
  CollocationScheme s;
  s.r = r;
  s.h = h;
  s.quadrature = gauss_rule(r);
  s.basis = legendre_basis(r);
  s.validate();
  return s;
}

void CollocationScheme::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("CollocationScheme: stepsize must be positive");
  if (quadrature.size() != r || basis.size() != r) {
    throw InputError("CollocationScheme: quadrature and basis must both have r entries");
  }
  if (max_iterations < 1) throw InputError("CollocationScheme: max_iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw InputError("CollocationScheme: tolerance must be >= 0");
}

std::vector<Matrix> abar_from_phi(const PhiTable& phi, const OrthonormalBasis& basis, double tau,
                                  std::span<const double> sigmas) {
  const int r = basis.size();
  if (phi.kmax < r) throw InputError("abar_from_phi: phi table must reach index r");
  // k! tau^k phibar_{k+1}(tau h A), k = 0..r-1
  std::vector<Matrix> terms;
  terms.reserve(static_cast<std::size_t>(r));
  double factor = 1.0;
  for (int k = 0; k < r; ++k) {
    if (k > 0) factor *= k * tau;
    terms.push_back(factor * phi[k + 1]);
  }
  std::vector<Matrix> out;
  out.reserve(sigmas.size());
  for (double sigma : sigmas) {
    const Vector w = monomial_weights(basis, sigma);
    Matrix m(phi.argument.rows(), phi.argument.cols());
    for (int k = 0; k < r; ++k) m += w[static_cast<std::size_t>(k)] * terms[static_cast<std::size_t>(k)];
    out.push_back(std::move(m));
  }
  return out;
}

Matrix abar(const Matrix& a, double h, const OrthonormalBasis& basis, double tau, double sigma) {
  const PhiTable phi = phi_table((tau * h) * a, basis.size());
  const double s[] = {sigma};
  return abar_from_phi(phi, basis, tau, s).front();
}

CoefficientTable build_coefficients(const SemilinearSystem& system, const CollocationScheme& scheme) {
  scheme.validate();
  if (!system.a.square()) throw InputError("build_coefficients: A must be square");
  const int r = scheme.r;
  const auto& nodes = scheme.quadrature.nodes;
  const auto& weights = scheme.quadrature.weights;

  CoefficientTable t;
  t.h = scheme.h;
  t.r = r;
  t.nodes = nodes;
  t.weights = weights;
  for (int i = 0; i < r; ++i) {
    const double c = nodes[static_cast<std::size_t>(i)];
    const PhiTable phi = phi_table((c * scheme.h) * system.a, r);
    t.stage_propagators.push_back(phi[0]);
    t.stage_coefficients.push_back(abar_from_phi(phi, scheme.basis, c, nodes));
  }
  const PhiTable phi1 = phi_table(scheme.h * system.a, r);
  t.endpoint_propagator = phi1[0];
  t.endpoint_coefficients = abar_from_phi(phi1, scheme.basis, 1.0, nodes);

  t.stage_weighted.resize(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    const double c = nodes[static_cast<std::size_t>(i)];
    for (int j = 0; j < r; ++j) {
      const double w = c * scheme.h * weights[static_cast<std::size_t>(j)];
      t.stage_weighted[static_cast<std::size_t>(i)].push_back(
          w * t.stage_coefficients[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
  }
  for (int j = 0; j < r; ++j) {
    t.endpoint_weighted.push_back((scheme.h * weights[static_cast<std::size_t>(j)]) *
                                  t.endpoint_coefficients[static_cast<std::size_t>(j)]);
  }

  auto check = [](const Matrix& m) {
    if (!all_finite(m)) throw NumericError("build_coefficients: non-finite coefficient");
  };
  std::for_each(t.stage_propagators.begin(), t.stage_propagators.end(), check);
  for (const auto& row : t.stage_coefficients) std::for_each(row.begin(), row.end(), check);
  check(t.endpoint_propagator);
  std::for_each(t.endpoint_coefficients.begin(), t.endpoint_coefficients.end(), check);
  return t;
}

StepResult step(const SemilinearSystem& system, const CollocationScheme& scheme, const CoefficientTable& table,
                std::span<const double> y0) {
  const std::size_t d = system.dimension();
  const auto r = static_cast<std::size_t>(table.r);
  if (y0.size() != d) throw InputError("step: state dimension mismatch");
  if (table.endpoint_propagator.rows() != d || table.r != scheme.r) {
    throw InputError("step: coefficient table does not match system/scheme");
  }

  std::vector<Vector> base(r);
  for (std::size_t i = 0; i < r; ++i) base[i] = table.stage_propagators[i] * y0;

  StepResult out;
  out.stages = base;
  std::vector<Vector> gvals(r, Vector(d, 0.0));

  if (system.has_nonlinearity()) {
    std::vector<Vector> next(r, Vector(d));
    out.diagnostics.converged = false;
    for (int it = 1; it <= scheme.max_iterations; ++it) {
      for (std::size_t j = 0; j < r; ++j) system.eval_g(out.stages[j], gvals[j]);
      double update = 0.0;
      for (std::size_t i = 0; i < r; ++i) {
        next[i] = base[i];
        for (std::size_t j = 0; j < r; ++j) multiply_add(table.stage_weighted[i][j], gvals[j], next[i], 1.0, 1.0);
        update = std::max(update, max_abs_diff(next[i], out.stages[i]));
      }
      std::swap(out.stages, next);
      out.diagnostics.iterations = it;
      out.diagnostics.residual = update;
      if (!std::isfinite(update)) throw NumericError("step: non-finite stage values");
      const double floor = 16.0 * kEps * stage_scale(out.stages);
      if (update <= std::max(scheme.tolerance, floor)) {
        out.diagnostics.converged = true;
        break;
      }
    }
    for (std::size_t j = 0; j < r; ++j) system.eval_g(out.stages[j], gvals[j]);
  }

  out.y1 = table.endpoint_propagator * y0;
  for (std::size_t j = 0; j < r; ++j) {
    if (system.has_nonlinearity()) multiply_add(table.endpoint_weighted[j], gvals[j], out.y1, 1.0, 1.0);
  }
  if (!all_finite(out.y1)) throw NumericError("step: non-finite state");
  return out;
}

Vector dense_output(const SemilinearSystem& system, const CollocationScheme& scheme, const CoefficientTable& table,
                    std::span<const double> y0, std::span<const Vector> stages, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("dense_output: tau must lie in [0,1]");
  const std::size_t d = system.dimension();
  const auto r = static_cast<std::size_t>(table.r);
  if (y0.size() != d || stages.size() != r) throw InputError("dense_output: dimension mismatch");
  if (tau == 0.0) return Vector(y0.begin(), y0.end());

  std::vector<Vector> gvals(r, Vector(d, 0.0));
  for (std::size_t j = 0; j < r; ++j) system.eval_g(stages[j], gvals[j]);

  if (tau == 1.0) {
    Vector y = table.endpoint_propagator * y0;
    if (system.has_nonlinearity())
      for (std::size_t j = 0; j < r; ++j) multiply_add(table.endpoint_weighted[j], gvals[j], y, 1.0, 1.0);
    return y;
  }

  const PhiTable phi = phi_table((tau * scheme.h) * system.a, scheme.r);
  const auto coeffs = abar_from_phi(phi, scheme.basis, tau, table.nodes);
  Vector y = phi[0] * y0;
  if (system.has_nonlinearity()) {
    for (std::size_t j = 0; j < r; ++j) {
      multiply_add(coeffs[j], gvals[j], y, tau * scheme.h * table.weights[j], 1.0);
    }
  }
  return y;
}

RunResult integrate(const SemilinearSystem& system, const CollocationScheme& scheme, std::span<const double> y0,
                    double t_end) {
  scheme.validate();
  if (!(t_end > 0.0)) throw InputError("integrate: T must be positive");
  if (y0.size() != system.dimension()) throw InputError("integrate: initial state dimension mismatch");
  const std::size_t n = step_count(t_end, scheme.h);

  const CoefficientTable table = build_coefficients(system, scheme);
  const double last_h = t_end - static_cast<double>(n - 1) * scheme.h;
  const bool short_last = std::abs(last_h - scheme.h) > 1e-12 * scheme.h;

  RunResult res;
  res.times.reserve(n + 1);
  res.states.reserve(n + 1);
  res.times.push_back(0.0);
  res.states.emplace_back(y0.begin(), y0.end());
  if (system.has_energy()) res.energies.push_back(system.eval_energy(y0));
  const double scale = norm_inf(y0);

  for (std::size_t k = 0; k < n; ++k) {
    const bool last = (k + 1 == n);
    StepResult sr;
    try {
      if (last && short_last) {
        CollocationScheme tail = scheme;
        tail.h = last_h;
        sr = step(system, tail, build_coefficients(system, tail), res.states.back());
      } else {
        sr = step(system, scheme, table, res.states.back());
      }
    } catch (const NumericError& e) {
      throw NumericBlowup(std::string("integrate: ") + e.what(), std::move(res), k);
    }
    if (!state_is_sane(sr.y1, scale)) throw NumericBlowup("integrate: state blew up", std::move(res), k);
    res.iterations.push_back(sr.diagnostics.iterations);
    res.residuals.push_back(sr.diagnostics.residual);
    res.converged.push_back(sr.diagnostics.converged ? 1 : 0);
    res.times.push_back(last ? t_end : static_cast<double>(k + 1) * scheme.h);
    if (system.has_energy()) res.energies.push_back(system.eval_energy(sr.y1));
    res.states.push_back(std::move(sr.y1));
  }
  return res;
}

StepsizeAdvisory stepsize_guard(const SemilinearSystem& system, const CollocationScheme& scheme,
                                std::span<const double> y0) {
  StepsizeAdvisory adv;
  const std::size_t d = system.dimension();
  const CoefficientTable table = build_coefficients(system, scheme);
  for (const auto& row : table.stage_coefficients)
    for (const auto& m : row) adv.m0 = std::max(adv.m0, norm_inf(m));
  for (const auto& m : table.endpoint_coefficients) adv.m0 = std::max(adv.m0, norm_inf(m));
  adv.radius = 0.5 * std::max(1.0, norm_inf(y0));

  if (system.has_nonlinearity()) {
    std::vector<Vector> samples{Vector(y0.begin(), y0.end())};
    for (std::size_t i = 0; i < d; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        Vector y(y0.begin(), y0.end());
        y[i] += sgn * adv.radius;
        samples.push_back(std::move(y));
      }
    }
    Vector gp(d), gm(d);
    for (const auto& y : samples) {
      adv.d0 = std::max(adv.d0, norm_inf(system.eval_g(y)));
      Matrix jac(d, d);
      Vector yy = y;
      for (std::size_t j = 0; j < d; ++j) {
        const double step = 1e-6 * std::max(1.0, std::abs(y[j]));
        yy[j] = y[j] + step;
        system.eval_g(yy, gp);
        yy[j] = y[j] - step;
        system.eval_g(yy, gm);
        yy[j] = y[j];
        for (std::size_t i = 0; i < d; ++i) jac(i, j) = (gp[i] - gm[i]) / (2.0 * step);
      }
      adv.d1 = std::max(adv.d1, norm_inf(jac));
    }
  }

  std::ostringstream msg;
  if (adv.d1 == 0.0) {
    adv.unconditional = true;
    adv.threshold = std::numeric_limits<double>::infinity();
    adv.beta = 0.0;
    msg << "unconditional: g has zero derivative near y0";
  } else {
    double bound = std::min(1.0, 1.0 / (adv.m0 * adv.d1));
    if (adv.d0 > 0.0) bound = std::min(bound, adv.radius / (adv.m0 * adv.d0));
    adv.threshold = bound;
    adv.beta = scheme.h * adv.m0 * adv.d1;
    adv.warn = adv.beta >= 1.0 || scheme.h > bound;
    msg << (adv.warn ? "warning: " : "ok: ") << "h = " << scheme.h << ", estimated bound " << bound
        << ", contraction factor " << adv.beta;
  }
  adv.message = msg.str();
  return adv;
}

}  // namespace expcol

#include "expcol/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "expcol/errors.hpp"
#include "expcol/matfun.hpp"

namespace expcol {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSeriesTerms = 60;
constexpr double kSeriesTol = 1e-16;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}


void require_square(const Matrix& k, const char* what) {
  if (!k.square()) throw InputError(std::string(what) + ": K must be square");
  if (!all_finite(k)) throw InputError(std::string(what) + ": K has non-finite entries");
}

bool use_spectral(const Matrix& k) { return norm_inf(k) > kSeriesNormLimit && is_symmetric(k, 1e-12 * max_abs(k)); }

// sum_l coef(l) K^l, truncated once bound(l) * |K|^l falls below the tolerance
// relative to the running sum.
Matrix matrix_series(const Matrix& k, const std::function<double(int)>& coef, const std::function<double(int)>& bound,
                     SeriesInfo* info, const char* what) {
  const std::size_t d = k.rows();
  const double knorm = norm_inf(k);
  Matrix power = Matrix::identity(d);
  Matrix sum(d, d);
  double knorm_pow = 1.0;
  for (int l = 0; l < kMaxSeriesTerms; ++l) {
    if (l > 0) {
      power = power * k;
      knorm_pow *= knorm;
    }
    const double c = coef(l);
    if (c != 0.0) sum += c * power;
    const double tail = bound(l) * knorm_pow;
    if (tail <= kSeriesTol * max_abs(sum) || tail == 0.0) {
      if (info) info->terms = std::max(info->terms, l + 1);
      return sum;
    }
  }
  throw NumericError(std::string(what) + ": series did not converge within " + std::to_string(kMaxSeriesTerms) +
                     " terms (|K| = " + std::to_string(knorm) + ")");
}

// Composite Gauss-Legendre for smooth oscillatory integrands on [0,1].
double integrate_oscillatory(const std::function<double(double)>& f, double omega) {
  static const QuadratureRule rule = gauss_rule(kMaxBasisOrder);
  const int panels = 1 + static_cast<int>(std::ceil(std::abs(omega) / 2.0));
  const double width = 1.0 / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * width;
    for (int q = 0; q < rule.size(); ++q) {
      sum += width * rule.weights[static_cast<std::size_t>(q)] * f(a + width * rule.nodes[static_cast<std::size_t>(q)]);
    }
  }
  return sum;
}

double scalar_phi_even(double lambda, int i) {
  if (lambda >= 0.0) {
    const double w = std::sqrt(lambda);
    if (i == 0) return std::cos(w);
    if (i == 1) return w == 0.0 ? 1.0 : std::sin(w) / w;
  } else {
    const double w = std::sqrt(-lambda);
    if (i == 0) return std::cosh(w);
    if (i == 1) return std::sinh(w) / w;
  }
  // phi_{i-2} = 1/(i-2)! - lambda phi_i
  return (1.0 / factorial(i - 2) - scalar_phi_even(lambda, i - 2)) / lambda;
}

// x phi_1(x^2 lambda) and phi_0(x^2 lambda)
double sin_kernel(double lambda, double x) {
  if (lambda >= 0.0) {
    const double w = std::sqrt(lambda);
    return w == 0.0 ? x : std::sin(w * x) / w;
  }
  const double w = std::sqrt(-lambda);
  return std::sinh(w * x) / w;
}

double cos_kernel(double lambda, double x) {
  return lambda >= 0.0 ? std::cos(std::sqrt(lambda) * x) : std::cosh(std::sqrt(-lambda) * x);
}

Matrix spectral_apply(const Matrix& k, const std::function<double(double)>& f, SeriesInfo* info) {
  const SymmetricEigen eig = symmetric_eigen(k);
  Vector diag(eig.values.size());
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = f(eig.values[i]);
  if (info) info->spectral = true;
  return reconstruct(eig, diag);
}

// 0F1[; b; x] series coefficient of x^l: 1 / ((b)_l l!)
double hyp0f1_coef(double b, int l) {
  double c = 1.0;
  for (int m = 0; m < l; ++m) c /= (b + m) * (m + 1);
  return c;
}

Matrix hyp0f1(const Matrix& x, double b, SeriesInfo* info) {
  auto coef = [b](int l) { return hyp0f1_coef(b, l); };
  return matrix_series(x, coef, [b](int l) { return std::abs(hyp0f1_coef(b, l)); }, info, "hyp0f1");
}

Matrix matrix_power(const Matrix& k, int n) {
  Matrix p = Matrix::identity(k.rows());
  for (int i = 0; i < n; ++i) p = p * k;
  return p;
}

}  // namespace

Matrix phi_even(const Matrix& k, int i, bool allow_nonsymmetric, SeriesInfo* info) {
  require_square(k, "phi_even");
  if (i < 0) throw InputError("phi_even: index must be >= 0");
  const bool symmetric = is_symmetric(k, 1e-12 * std::max(1.0, max_abs(k)));
  if (!symmetric && !allow_nonsymmetric) throw InputError("phi_even: K must be symmetric");

  if (norm_inf(k) <= kSeriesNormLimit) {
    auto coef = [i](int l) { return ((l % 2 == 0) ? 1.0 : -1.0) / factorial(2 * l + i); };
    return matrix_series(k, coef, [i](int l) { return 1.0 / factorial(2 * l + i); }, info, "phi_even");
  }
  if (symmetric) return spectral_apply(k, [i](double lam) { return scalar_phi_even(lam, i); }, info);
  if (i > 1) throw NumericError("phi_even: non-symmetric K beyond the series range supports i <= 1 only");
  // exp([[0, I], [-K, 0]]) = [[phi0(K), phi1(K)], [-K phi1(K), phi0(K)]]
  const std::size_t d = k.rows();
  Matrix big(2 * d, 2 * d);
  for (std::size_t r = 0; r < d; ++r) {
    big(r, d + r) = 1.0;
    for (std::size_t c = 0; c < d; ++c) big(d + r, c) = -k(r, c);
  }
  const Matrix e = expm(big);
  Matrix out(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) out(r, c) = e(r, c + (i == 1 ? d : 0));
  if (info) info->spectral = true;
  return out;
}

double hyp2f1_terminating(int n, double b, double c, double x) {
  if (n < 0) throw InputError("hyp2f1_terminating: n must be >= 0");
  double term = 1.0;
  double sum = 1.0;
  for (int m = 0; m < n; ++m) {
    term *= (-n + m) * (b + m) / ((c + m) * (m + 1)) * x;
    sum += term;
  }
  return sum;
}

Matrix tcr_a(const Matrix& k, const OrthonormalBasis& basis, double tau, double sigma, SeriesInfo* info) {
  require_square(k, "tcr_a");
  const int r = basis.size();
  const Vector p = basis.evaluate(sigma);

  if (use_spectral(k)) {
    return spectral_apply(
        k,
        [&](double lam) {
          const double omega = std::sqrt(std::abs(lam));
          return integrate_oscillatory(
              [&](double xi) {
                double pj = 0.0;
                for (int j = 0; j < r; ++j) pj += basis(j, xi * tau) * p[static_cast<std::size_t>(j)];
                return sin_kernel(lam, 1.0 - xi) * pj;
              },
              omega);
        },
        info);
  }

  auto coef = [&](int l) {
    double c = 0.0;
    for (int j = 0; j < r; ++j) {
      const double sign = ((j + l) % 2 == 0) ? 1.0 : -1.0;
      c += std::sqrt(2.0 * j + 1.0) * p[static_cast<std::size_t>(j)] * sign / factorial(2 * l + 2) *
           hyp2f1_terminating(j, j + 1.0, 2.0 * l + 3.0, tau);
    }
    return c;
  };
  auto bound = [&](int l) {
    double c = 0.0;
    for (int j = 0; j < r; ++j) {
      // |2F1[-j, j+1; c; tau]| <= 2F1 with |.| terms <= 2F1[-j, j+1; c; -1] for tau in [0,1]
      c += std::sqrt(2.0 * j + 1.0) * std::abs(p[static_cast<std::size_t>(j)]) / factorial(2 * l + 2) *
           std::abs(hyp2f1_terminating(j, j + 1.0, 2.0 * l + 3.0, -std::abs(tau)));
    }
    return c;
  };
  return matrix_series(k, coef, bound, info, "tcr_a");
}

Matrix tcr_s(const Matrix& k, int j, SeriesInfo* info) {
  require_square(k, "tcr_s");
  if (j < 0) throw InputError("tcr_s: j must be >= 0");
  if (use_spectral(k)) {
    static const OrthonormalBasis wide = legendre_basis(kMaxBasisOrder);
    if (j >= wide.size()) throw InputError("tcr_s: j too large");
    const double norm = std::sqrt(2.0 * j + 1.0);
    return spectral_apply(
        k,
        [&](double lam) {
          return integrate_oscillatory([&](double xi) { return cos_kernel(lam, 1.0 - xi) * wide(j, xi); },
                                       std::sqrt(std::abs(lam))) /
                 norm;
        },
        info);
  }
  const Matrix x = (-1.0 / 16.0) * k;
  const int m = j / 2;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  if (j % 2 == 0) {
    const double c = sign * factorial(2 * m) / factorial(4 * m + 1);
    return c * (matrix_power(k, m) * (hyp0f1(x, 0.5, info) * hyp0f1(x, 2.0 * m + 1.5, info)));
  }
  const double c = sign * factorial(2 * m + 2) / factorial(4 * m + 4);
  return c * (matrix_power(k, m + 1) * (hyp0f1(x, 1.5, info) * hyp0f1(x, 2.0 * m + 2.5, info)));
}

Matrix tcr_b(const Matrix& k, const OrthonormalBasis& basis, double sigma, SeriesInfo* info) {
  require_square(k, "tcr_b");
  const Vector p = basis.evaluate(sigma);
  Matrix out(k.rows(), k.cols());
  for (int j = 0; j < basis.size(); ++j) {
    out += (std::sqrt(2.0 * j + 1.0) * p[static_cast<std::size_t>(j)]) * tcr_s(k, j, info);
  }
  return out;
}

double rkn_a(const OrthonormalBasis& basis, double tau, double sigma) {
  const Vector p = basis.evaluate(sigma);
  double out = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    const Vector& a = basis.coefficients(j);
    double inner = 0.0;
    double tk = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      inner += a[k] * tk / ((k + 1.0) * (k + 2.0));
      tk *= tau;
    }
    out += inner * p[static_cast<std::size_t>(j)];
  }
  return out;
}

double rkn_b(const OrthonormalBasis& basis, double sigma) {
  const Vector p = basis.evaluate(sigma);
  double out = 0.0;
  for (int j = 0; j < basis.size(); ++j) {
    const Vector& a = basis.coefficients(j);
    double inner = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) inner += a[k] / (k + 1.0);
    out += inner * p[static_cast<std::size_t>(j)];
  }
  return out;
}

TcrTable build_tcr_coefficients(const SecondOrderSystem& system, const CollocationScheme& scheme) {
  scheme.validate();
  if (!system.undamped()) {
    throw InputError("build_tcr_coefficients: TCr covers N = 0 only; use to_first_order() for damped problems");
  }
  if (!system.multi_frequency && !is_symmetric(system.omega, 1e-12 * std::max(1.0, max_abs(system.omega)))) {
    throw InputError("build_tcr_coefficients: Omega must be symmetric");
  }
  const bool nonsym = system.multi_frequency;
  const int r = scheme.r;
  const double h = scheme.h;
  TcrTable t;
  t.h = h;
  t.r = r;
  t.nodes = scheme.quadrature.nodes;
  t.weights = scheme.quadrature.weights;
  SeriesInfo info;

  for (int i = 0; i < r; ++i) {
    const double c = t.nodes[static_cast<std::size_t>(i)];
    const Matrix k = (c * c * h * h) * system.omega;
    t.stage_phi0.push_back(phi_even(k, 0, nonsym, &info));
    t.stage_phi1.push_back(phi_even(k, 1, nonsym, &info));
    std::vector<Matrix> row;
    std::vector<Matrix> wrow;
    for (int j = 0; j < r; ++j) {
      row.push_back(tcr_a(k, scheme.basis, c, t.nodes[static_cast<std::size_t>(j)], &info));
      wrow.push_back((c * c * h * h * t.weights[static_cast<std::size_t>(j)]) * row.back());
    }
    t.stage_a.push_back(std::move(row));
    t.stage_weighted.push_back(std::move(wrow));
  }
  const Matrix k1 = (h * h) * system.omega;
  t.end_phi0 = phi_even(k1, 0, nonsym, &info);
  t.end_phi1 = phi_even(k1, 1, nonsym, &info);
  t.end_omega_phi1 = system.omega * t.end_phi1;
  for (int j = 0; j < r; ++j) {
    const double sj = t.nodes[static_cast<std::size_t>(j)];
    const double bj = t.weights[static_cast<std::size_t>(j)];
    t.end_a.push_back(tcr_a(k1, scheme.basis, 1.0, sj, &info));
    t.end_b.push_back(tcr_b(k1, scheme.basis, sj, &info));
    t.end_a_weighted.push_back((h * h * bj) * t.end_a.back());
    t.end_b_weighted.push_back((h * bj) * t.end_b.back());
  }
  t.max_series_terms = info.terms;
  return t;
}

OscillatoryStep tcr_step(const SecondOrderSystem& system, const CollocationScheme& scheme, const TcrTable& table,
                         std::span<const double> q0, std::span<const double> p0) {
  const std::size_t d = system.dimension();
  const auto r = static_cast<std::size_t>(table.r);
  if (q0.size() != d || p0.size() != d) throw InputError("tcr_step: dimension mismatch");
  if (!system.undamped()) throw InputError("tcr_step: damped systems go through to_first_order()");
  if (table.r != scheme.r || table.end_phi0.rows() != d) throw InputError("tcr_step: table does not match");

  std::vector<Vector> base(r);
  for (std::size_t i = 0; i < r; ++i) {
    base[i] = table.stage_phi0[i] * q0;
    multiply_add(table.stage_phi1[i], p0, base[i], table.nodes[i] * table.h, 1.0);
  }

  OscillatoryStep out;
  out.stages = base;
  std::vector<Vector> f(r, Vector(d, 0.0));
  if (system.has_potential()) {
    std::vector<Vector> next(r);
    out.diagnostics.converged = false;
    for (int it = 1; it <= scheme.max_iterations; ++it) {
      for (std::size_t j = 0; j < r; ++j) system.eval_grad_u(out.stages[j], f[j]);
      double update = 0.0;
      double scale = 1.0;
      for (std::size_t i = 0; i < r; ++i) {
        next[i] = base[i];
        for (std::size_t j = 0; j < r; ++j) multiply_add(table.stage_weighted[i][j], f[j], next[i], -1.0, 1.0);
        update = std::max(update, max_abs_diff(next[i], out.stages[i]));
        scale = std::max(scale, norm_inf(next[i]));
      }
      std::swap(out.stages, next);
      out.diagnostics.iterations = it;
      out.diagnostics.residual = update;
      if (!std::isfinite(update)) throw NumericError("tcr_step: non-finite stage values");
      if (update <= std::max(scheme.tolerance, 16.0 * kEps * scale)) {
        out.diagnostics.converged = true;
        break;
      }
    }
    for (std::size_t j = 0; j < r; ++j) system.eval_grad_u(out.stages[j], f[j]);
  }

  out.q1 = table.end_phi0 * q0;
  multiply_add(table.end_phi1, p0, out.q1, table.h, 1.0);
  out.p1 = table.end_phi0 * p0;
  multiply_add(table.end_omega_phi1, q0, out.p1, -table.h, 1.0);
  if (system.has_potential()) {
    for (std::size_t j = 0; j < r; ++j) {
      multiply_add(table.end_a_weighted[j], f[j], out.q1, -1.0, 1.0);
      multiply_add(table.end_b_weighted[j], f[j], out.p1, -1.0, 1.0);
    }
  }
  if (!all_finite(out.q1) || !all_finite(out.p1)) throw NumericError("tcr_step: non-finite state");
  return out;
}

OscillatoryStep rkn_step(const SecondOrderSystem& system, const CollocationScheme& scheme,
                         std::span<const double> q0, std::span<const double> p0, const QuadratureRule* integration) {
  scheme.validate();
  const std::size_t d = system.dimension();
  if (q0.size() != d || p0.size() != d) throw InputError("rkn_step: dimension mismatch");
  if (max_abs(system.omega) != 0.0) throw InputError("rkn_step: requires Omega = 0");
  if (!system.undamped()) throw InputError("rkn_step: requires N = 0");

  const QuadratureRule& rule = integration ? *integration : scheme.quadrature;
  const auto r = static_cast<std::size_t>(scheme.r);
  const auto nq = static_cast<std::size_t>(rule.size());
  const Vector& dn = scheme.quadrature.nodes;
  const double h = scheme.h;

  // interp[n][m] = l_m(sigma_n)
  std::vector<Vector> interp(nq);
  for (std::size_t n = 0; n < nq; ++n) interp[n] = lagrange_weights(dn, rule.nodes[n]);

  // weighted[i][n] = d_i^2 h^2 beta_n Abar_{d_i, sigma_n}
  std::vector<Vector> weighted(r, Vector(nq));
  Vector end_a(nq), end_b(nq);
  for (std::size_t n = 0; n < nq; ++n) {
    const double sn = rule.nodes[n];
    const double bn = rule.weights[n];
    for (std::size_t i = 0; i < r; ++i) weighted[i][n] = dn[i] * dn[i] * h * h * bn * rkn_a(scheme.basis, dn[i], sn);
    end_a[n] = h * h * bn * rkn_a(scheme.basis, 1.0, sn);
    end_b[n] = h * bn * rkn_b(scheme.basis, sn);
  }

  std::vector<Vector> base(r);
  for (std::size_t i = 0; i < r; ++i) {
    base[i] = Vector(q0.begin(), q0.end());
    for (std::size_t c = 0; c < d; ++c) base[i][c] += dn[i] * h * p0[c];
  }

  OscillatoryStep out;
  out.stages = base;
  std::vector<Vector> f(nq, Vector(d, 0.0));
  Vector qs(d);
  auto eval_forces = [&](const std::vector<Vector>& stages) {
    for (std::size_t n = 0; n < nq; ++n) {
      std::fill(qs.begin(), qs.end(), 0.0);
      for (std::size_t m = 0; m < r; ++m)
        for (std::size_t c = 0; c < d; ++c) qs[c] += interp[n][m] * stages[m][c];
      system.eval_grad_u(qs, f[n]);
    }
  };

  if (system.has_potential()) {
    std::vector<Vector> next(r);
    out.diagnostics.converged = false;
    for (int it = 1; it <= scheme.max_iterations; ++it) {
      eval_forces(out.stages);
      double update = 0.0;
      double scale = 1.0;
      for (std::size_t i = 0; i < r; ++i) {
        next[i] = base[i];
        for (std::size_t n = 0; n < nq; ++n)
          for (std::size_t c = 0; c < d; ++c) next[i][c] -= weighted[i][n] * f[n][c];
        update = std::max(update, max_abs_diff(next[i], out.stages[i]));
        scale = std::max(scale, norm_inf(next[i]));
      }
      std::swap(out.stages, next);
      out.diagnostics.iterations = it;
      out.diagnostics.residual = update;
      if (!std::isfinite(update)) throw NumericError("rkn_step: non-finite stage values");
      if (update <= std::max(scheme.tolerance, 16.0 * kEps * scale)) {
        out.diagnostics.converged = true;
        break;
      }
    }
    eval_forces(out.stages);
  }

  out.q1 = Vector(q0.begin(), q0.end());
  out.p1 = Vector(p0.begin(), p0.end());
  for (std::size_t c = 0; c < d; ++c) out.q1[c] += h * p0[c];
  if (system.has_potential()) {
    for (std::size_t n = 0; n < nq; ++n) {
      for (std::size_t c = 0; c < d; ++c) {
        out.q1[c] -= end_a[n] * f[n][c];
        out.p1[c] -= end_b[n] * f[n][c];
      }
    }
  }
  if (!all_finite(out.q1) || !all_finite(out.p1)) throw NumericError("rkn_step: non-finite state");
  return out;
}

namespace {

using SecondOrderStepper = std::function<OscillatoryStep(const CollocationScheme&, bool, std::span<const double>,
                                                         std::span<const double>)>;

RunResult drive_second_order(const SecondOrderSystem& system, const CollocationScheme& scheme,
                             std::span<const double> q0, std::span<const double> p0, double t_end,
                             const SecondOrderStepper& stepper) {
  scheme.validate();
  if (!(t_end > 0.0)) throw InputError("integrate: T must be positive");
  const std::size_t d = system.dimension();
  if (q0.size() != d || p0.size() != d) throw InputError("integrate: initial state dimension mismatch");
  const std::size_t n = step_count(t_end, scheme.h);
  const double last_h = t_end - static_cast<double>(n - 1) * scheme.h;
  const bool short_last = std::abs(last_h - scheme.h) > 1e-12 * scheme.h;

  RunResult res;
  auto push_state = [&](std::span<const double> q, std::span<const double> p) {
    Vector y(q.begin(), q.end());
    y.insert(y.end(), p.begin(), p.end());
    res.energies.push_back(system.energy(q, p));
    res.states.push_back(std::move(y));
  };
  res.times.push_back(0.0);
  push_state(q0, p0);
  const double scale = std::max(norm_inf(q0), norm_inf(p0));

  for (std::size_t k = 0; k < n; ++k) {
    const bool last = (k + 1 == n);
    const Vector& y = res.states.back();
    const std::span<const double> q(y.data(), d);
    const std::span<const double> p(y.data() + d, d);
    OscillatoryStep st;
    try {
      if (last && short_last) {
        CollocationScheme tail = scheme;
        tail.h = last_h;
        st = stepper(tail, true, q, p);
      } else {
        st = stepper(scheme, false, q, p);
      }
    } catch (const NumericError& e) {
      throw NumericBlowup(std::string("integrate: ") + e.what(), std::move(res), k);
    }
    if (!state_is_sane(st.q1, scale) || !state_is_sane(st.p1, scale)) {
      throw NumericBlowup("integrate: state blew up", std::move(res), k);
    }
    res.iterations.push_back(st.diagnostics.iterations);
    res.residuals.push_back(st.diagnostics.residual);
    res.converged.push_back(st.diagnostics.converged ? 1 : 0);
    res.times.push_back(last ? t_end : static_cast<double>(k + 1) * scheme.h);
    push_state(st.q1, st.p1);
  }
  return res;
}

}  // namespace

RunResult integrate_tcr(const SecondOrderSystem& system, const CollocationScheme& scheme, std::span<const double> q0,
                        std::span<const double> p0, double t_end) {
  const TcrTable table = build_tcr_coefficients(system, scheme);
  return drive_second_order(system, scheme, q0, p0, t_end,
                            [&](const CollocationScheme& s, bool fresh, std::span<const double> q,
                                std::span<const double> p) {
                              if (fresh) return tcr_step(system, s, build_tcr_coefficients(system, s), q, p);
                              return tcr_step(system, s, table, q, p);
                            });
}

RunResult integrate_rkn(const SecondOrderSystem& system, const CollocationScheme& scheme, std::span<const double> q0,
                        std::span<const double> p0, double t_end) {
  return drive_second_order(system, scheme, q0, p0, t_end,
                            [&](const CollocationScheme& s, bool, std::span<const double> q,
                                std::span<const double> p) { return rkn_step(system, s, q, p); });
}

}  // namespace expcol

#include "expcol/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "expcol/errors.hpp"

namespace expcol {

namespace {

void check_order(int r, const char* what) {
  if (r < 1 || r > kMaxBasisOrder) {
    throw InputError(std::string(what) + ": order must be in [1, " + std::to_string(kMaxBasisOrder) +
                     "], got " + std::to_string(r));
  }
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

struct LegendreValue {
  double value;
  double derivative;
};

// Legendre P_n and P_n' on [-1,1] by the three-term recurrence.
LegendreValue legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 1; k < n; ++k) {
    const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(std::vector<Vector> coefficients) : coeffs_(std::move(coefficients)) {}

double OrthonormalBasis::operator()(int j, double tau) const {
  const Vector& c = coefficients(j);
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * tau + *it;
  return acc;
}

Vector OrthonormalBasis::evaluate(double tau) const {
  Vector out(coeffs_.size());
  for (int j = 0; j < size(); ++j) out[static_cast<std::size_t>(j)] = (*this)(j, tau);
  return out;
}

OrthonormalBasis legendre_basis(int r) {
  check_order(r, "legendre_basis");
  std::vector<Vector> coeffs;
  coeffs.reserve(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) {
    Vector c(static_cast<std::size_t>(j) + 1);
    const double scale = ((j % 2 == 0) ? 1.0 : -1.0) * std::sqrt(2.0 * j + 1.0);
    for (int k = 0; k <= j; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      c[static_cast<std::size_t>(k)] = scale * sign * binomial(j, k) * binomial(j + k, k);
    }
    coeffs.push_back(std::move(c));
  }
  return OrthonormalBasis(std::move(coeffs));
}

double projection_kernel(const OrthonormalBasis& basis, double tau, double sigma) {
  double p = 0.0;
  for (int i = 0; i < basis.size(); ++i) p += basis(i, tau) * basis(i, sigma);
  return p;
}

QuadratureRule gauss_rule(int r) {
  check_order(r, "gauss_rule");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(r));
  rule.weights.resize(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (r + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(r, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16 && std::abs(p) <= 1e-15) break;
    }
    const auto [p, dp] = legendre(r, x);
    (void)p;
    // Map x in (-1,1) to tau in (0,1); x runs from near 1 downwards.
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  // Enforce exact symmetry about 1/2 so midpoint-symmetric identities hold bitwise.
  for (int i = 0; i < r / 2; ++i) {
    const std::size_t a = static_cast<std::size_t>(i);
    const std::size_t b = static_cast<std::size_t>(r - 1 - i);
    const double c = 0.5 * (rule.nodes[a] + (1.0 - rule.nodes[b]));
    rule.nodes[a] = c;
    rule.nodes[b] = 1.0 - c;
    const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
    rule.weights[a] = rule.weights[b] = w;
  }
  if (r % 2 == 1) rule.nodes[static_cast<std::size_t>(r / 2)] = 0.5;
  return rule;
}

Vector lagrange_weights(std::span<const double> nodes, double sigma) {
  const std::size_t r = nodes.size();
  if (r == 0) throw InputError("lagrange_weights: no nodes");
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      if (nodes[i] == nodes[j]) throw InputError("lagrange_weights: coincident nodes");
  Vector l(r, 1.0);
  for (std::size_t m = 0; m < r; ++m)
    for (std::size_t j = 0; j < r; ++j)
      if (j != m) l[m] *= (sigma - nodes[j]) / (nodes[m] - nodes[j]);
  return l;
}

}  // namespace expcol

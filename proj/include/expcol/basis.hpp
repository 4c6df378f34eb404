#pragma once

// Shifted Legendre basis on [0,1], its reproducing kernel, and Gauss-Legendre
// rules on [0,1].

#include <span>
#include <vector>

#include "expcol/linalg.hpp"

namespace expcol {

/// Largest supported basis size / rule size. Monomial coefficients of the
/// shifted Legendre polynomials grow like C(2j, j)^2, so beyond this the
/// floating-point representation stops being orthonormal to 1e-13.
inline constexpr int kMaxBasisOrder = 12;

/// p_0 ... p_{r-1}, orthonormal in L2(0,1), stored as monomial coefficients.
class OrthonormalBasis {
 public:
  OrthonormalBasis() = default;
  explicit OrthonormalBasis(std::vector<Vector> coefficients);

  int size() const noexcept { return static_cast<int>(coeffs_.size()); }
  /// Monomial coefficients of p_j, lowest degree first.
  const Vector& coefficients(int j) const { return coeffs_.at(static_cast<std::size_t>(j)); }

  double operator()(int j, double tau) const;
  /// (p_0(tau), ..., p_{r-1}(tau))
  Vector evaluate(double tau) const;

 private:
  std::vector<Vector> coeffs_;
};

struct QuadratureRule {
  Vector nodes;    // ascending, in (0,1)
  Vector weights;  // positive, sum to 1

  int size() const noexcept { return static_cast<int>(nodes.size()); }
};

/// p_j(tau) = (-1)^j sqrt(2j+1) sum_k C(j,k) C(j+k,k) (-tau)^k, j < r. 1 <= r <= 12.
OrthonormalBasis legendre_basis(int r);

/// P(tau, sigma) = sum_i p_i(tau) p_i(sigma).
double projection_kernel(const OrthonormalBasis& basis, double tau, double sigma);

/// r-point Gauss-Legendre rule on [0,1]; nodes are the roots of p_r. 1 <= r <= 12.
QuadratureRule gauss_rule(int r);

/// Cardinal polynomials (l_1(sigma), ..., l_r(sigma)) through the given nodes.
Vector lagrange_weights(std::span<const double> nodes, double sigma);
inline Vector lagrange_weights(const QuadratureRule& rule, double sigma) {
  return lagrange_weights(rule.nodes, sigma);
}

}  // namespace expcol

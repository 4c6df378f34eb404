#pragma once

// Matrix exponential and the phi-function family
//
//   phibar_0(Z) = exp(Z),
//   phibar_k(Z) = int_0^1 exp((1 - s) Z) s^(k-1) / (k-1)! ds,   k >= 1,
//
// equivalently phibar_k(Z) = sum_m Z^m / (m + k)!. Accuracy target is 1e-13
// relative in norm for ||Z|| <= 50.

#include <span>
#include <vector>

#include "expcol/linalg.hpp"

namespace expcol {

/// exp(Z) by Pade scaling and squaring. Throws InputError on non-finite input.
Matrix expm(const Matrix& z);

/// Scalar phibar_k(z). Taylor series for |z| < 1, upward recurrence otherwise.
double phi_scalar(double z, int k);

/// phibar_0(Z) ... phibar_kmax(Z) for one argument matrix.
struct PhiTable {
  Matrix argument;
  int kmax = 0;
  std::vector<Matrix> values;

  const Matrix& operator[](int k) const { return values.at(static_cast<std::size_t>(k)); }
  Vector apply(int k, std::span<const double> v) const;
};

/// Computes all phibar_k(Z), k = 0..kmax. Symmetric Z goes through an
/// eigendecomposition with scalar phibar on the eigenvalues; anything else
/// through the exponential of the block matrix
///
///   [ Z  I        ]
///   [    0  I     ]
///   [       .  I  ]
///   [          0  ]
///
/// whose first block row is (phibar_0(Z), ..., phibar_kmax(Z)).
PhiTable phi_table(const Matrix& z, int kmax);

/// phibar_k(Z) v.
Vector phi_apply(const Matrix& z, int k, std::span<const double> v);

}  // namespace expcol

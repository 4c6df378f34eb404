#pragma once

// Exponential collocation (ECr) for y' = A y + g(y).
//
// The continuous stage function is
//
//   u(tau) = exp(tau h A) y0 + tau h int_0^1 Abar_{tau,sigma}(A) g(u(sigma)) dsigma,
//   Abar_{tau,sigma}(A) = int_0^1 exp((1 - xi) tau h A) P(xi tau, sigma) dxi,
//
// and y1 = u(1). With the r-point Gauss rule (c_j, b_j) the practical scheme is
//
//   Y_i = exp(c_i h A) y0 + c_i h sum_j b_j Abar_{c_i,c_j}(A) g(Y_j),
//   y1  = exp(h A) y0     +     h sum_j b_j Abar_{1,c_j}(A)   g(Y_j).
//
// For the shifted Legendre basis, with p_i(t) = sum_k a_ik t^k,
//
//   Abar_{tau,sigma}(A) = sum_k [sum_i a_ik p_i(sigma)] k! tau^k phibar_{k+1}(tau h A).

#include <string>
#include <vector>

#include "expcol/basis.hpp"
#include "expcol/linalg.hpp"
#include "expcol/matfun.hpp"
#include "expcol/system.hpp"

namespace expcol {

struct CollocationScheme {
  int r = 2;
  double h = 0.0;
  QuadratureRule quadrature;
  OrthonormalBasis basis;
  /// Max-norm of the stage update below which the stage solve stops. Values
  /// below roundoff are clamped to the roundoff floor of the current stages.
  double tolerance = 1e-16;
  int max_iterations = 5;

  /// Gauss rule and Legendre basis of size r, stepsize h.
  static CollocationScheme make(int r, double h);
  void validate() const;
};

/// Abar_{tau,sigma}(A) for every sigma in `sigmas`, given phibar_0..r of tau h A.
std::vector<Matrix> abar_from_phi(const PhiTable& phi, const OrthonormalBasis& basis, double tau,
                                  std::span<const double> sigmas);

/// Abar_{tau,sigma}(A) for a single (tau, sigma).
Matrix abar(const Matrix& a, double h, const OrthonormalBasis& basis, double tau, double sigma);

struct CoefficientTable {
  double h = 0.0;
  int r = 0;
  Vector nodes;
  Vector weights;
  std::vector<Matrix> stage_propagators;                // exp(c_i h A)
  std::vector<std::vector<Matrix>> stage_coefficients;  // [i][j] Abar_{c_i,c_j}
  Matrix endpoint_propagator;                           // exp(h A)
  std::vector<Matrix> endpoint_coefficients;            // [j] Abar_{1,c_j}
  // Pre-weighted copies used in the stage solve.
  std::vector<std::vector<Matrix>> stage_weighted;  // c_i h b_j Abar_{c_i,c_j}
  std::vector<Matrix> endpoint_weighted;            // h b_j Abar_{1,c_j}
};

CoefficientTable build_coefficients(const SemilinearSystem& system, const CollocationScheme& scheme);

struct StepDiagnostics {
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

struct StepResult {
  Vector y1;
  std::vector<Vector> stages;
  StepDiagnostics diagnostics;
};

/// One step from y0. Non-convergence within max_iterations is flagged in the
/// diagnostics; non-finite stages throw NumericError.
StepResult step(const SemilinearSystem& system, const CollocationScheme& scheme, const CoefficientTable& table,
                std::span<const double> y0);

/// u(tau) for tau in [0,1] from the converged stages of a step started at y0.
Vector dense_output(const SemilinearSystem& system, const CollocationScheme& scheme, const CoefficientTable& table,
                    std::span<const double> y0, std::span<const Vector> stages, double tau);

/// Constant-stepsize integration over [0, T]. If T is not a multiple of h the
/// last step is shortened. Throws NumericBlowup with the partial result if the
/// state stops being finite.
RunResult integrate(const SemilinearSystem& system, const CollocationScheme& scheme, std::span<const double> y0,
                    double t_end);

/// Runtime estimate of the fixed-point existence condition
/// h < min(1/(M0 D1), R/(M0 D0), 1), with M0 the largest coefficient norm in
/// the table and D0, D1 bounds on |g| and |g'| sampled on a ball of radius R
/// around y0. Diagnostic only.
struct StepsizeAdvisory {
  bool unconditional = false;  // g has zero derivative on the sampled ball
  double m0 = 0.0;
  double d0 = 0.0;
  double d1 = 0.0;
  double radius = 0.0;
  double threshold = 0.0;  // estimated admissible stepsize bound
  double beta = 0.0;       // h M0 D1, estimated contraction factor
  bool warn = false;
  std::string message;
};

StepsizeAdvisory stepsize_guard(const SemilinearSystem& system, const CollocationScheme& scheme,
                                std::span<const double> y0);

}  // namespace expcol

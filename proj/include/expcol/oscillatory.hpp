#pragma once

// Trigonometric collocation (TCr) for q'' + Omega q = -grad U(q) and its
// Omega = 0 specialization (RKNCr).
//
//   q(tau) = phi0(K) q0 + tau h phi1(K) p0 - tau^2 h^2 int_0^1 Acal_{tau,sigma}(K) f(q(sigma)) dsigma
//   p(tau) = -tau h Omega phi1(K) q0 + phi0(K) p0 - tau h int_0^1 Bcal_{tau,sigma}(K) f(q(sigma)) dsigma
//
// with K = tau^2 h^2 Omega, f = grad U and phi_i(K) = sum_l (-1)^l K^l / (2l+i)!.

#include <vector>

#include "expcol/basis.hpp"
#include "expcol/ecr.hpp"
#include "expcol/linalg.hpp"
#include "expcol/system.hpp"

namespace expcol {

/// Above this infinity norm of K the alternating series are replaced by the
/// eigendecomposition of K (or, for non-symmetric K, a block exponential).
inline constexpr double kSeriesNormLimit = 100.0;

struct SeriesInfo {
  int terms = 0;
  bool spectral = false;
};

/// phi_i(K). For scalar K = w^2: phi_0 = cos w, phi_1 = sin(w)/w.
/// Non-symmetric K is rejected unless allow_nonsymmetric is set.
Matrix phi_even(const Matrix& k, int i, bool allow_nonsymmetric = false, SeriesInfo* info = nullptr);

/// Terminating 2F1[-n, b; c; x].
double hyp2f1_terminating(int n, double b, double c, double x);

/// Acal_{tau,sigma}(K) from the hypergeometric series
///   sum_j sqrt(2j+1) p_j(sigma) sum_l (-1)^(j+l) / (2l+2)! 2F1[-j, j+1; 2l+3; tau] K^l.
Matrix tcr_a(const Matrix& k, const OrthonormalBasis& basis, double tau, double sigma, SeriesInfo* info = nullptr);

/// S_j(K) = (1/sqrt(2j+1)) int_0^1 phi_0((1-xi)^2 K) p_j(xi) dxi via products of 0F1 series.
Matrix tcr_s(const Matrix& k, int j, SeriesInfo* info = nullptr);

/// Bcal_{1,sigma}(K) = sum_j sqrt(2j+1) p_j(sigma) S_j(K).
Matrix tcr_b(const Matrix& k, const OrthonormalBasis& basis, double sigma, SeriesInfo* info = nullptr);

/// RKNCr tables (K = 0) in closed form from the basis coefficients:
///   Abar_{tau,sigma} = sum_j p_j(sigma) sum_k a_jk tau^k / ((k+1)(k+2)),
///   Bbar_{1,sigma}   = sum_j p_j(sigma) sum_k a_jk / (k+1).
double rkn_a(const OrthonormalBasis& basis, double tau, double sigma);
double rkn_b(const OrthonormalBasis& basis, double sigma);

struct TcrTable {
  double h = 0.0;
  int r = 0;
  Vector nodes;
  Vector weights;
  std::vector<Matrix> stage_phi0;                 // phi0(c_i^2 h^2 Omega)
  std::vector<Matrix> stage_phi1;                 // phi1(c_i^2 h^2 Omega)
  std::vector<std::vector<Matrix>> stage_a;       // [i][j] Acal_{c_i,c_j}(K_i)
  Matrix end_phi0;
  Matrix end_phi1;
  Matrix end_omega_phi1;                          // Omega phi1(h^2 Omega)
  std::vector<Matrix> end_a;                      // Acal_{1,c_j}(h^2 Omega)
  std::vector<Matrix> end_b;                      // Bcal_{1,c_j}(h^2 Omega)
  std::vector<std::vector<Matrix>> stage_weighted;  // c_i^2 h^2 b_j Acal_{c_i,c_j}
  std::vector<Matrix> end_a_weighted;               // h^2 b_j Acal_{1,c_j}
  std::vector<Matrix> end_b_weighted;               // h b_j Bcal_{1,c_j}
  int max_series_terms = 0;
};

TcrTable build_tcr_coefficients(const SecondOrderSystem& system, const CollocationScheme& scheme);

struct OscillatoryStep {
  Vector q1;
  Vector p1;
  std::vector<Vector> stages;  // q at the stage nodes
  StepDiagnostics diagnostics;
};

/// One TCr step. Requires N = 0; damped problems go through to_first_order().
OscillatoryStep tcr_step(const SecondOrderSystem& system, const CollocationScheme& scheme, const TcrTable& table,
                         std::span<const double> q0, std::span<const double> p0);

/// One RKNCr step for Omega = 0. Stages live at the scheme's nodes d_i; the
/// sigma-integrals use `integration` (defaults to the scheme's own rule) with
/// q(sigma) = sum_m q_{d_m} l_m(sigma).
OscillatoryStep rkn_step(const SecondOrderSystem& system, const CollocationScheme& scheme,
                         std::span<const double> q0, std::span<const double> p0,
                         const QuadratureRule* integration = nullptr);

/// States are (q, p) concatenated; energies from system.energy.
RunResult integrate_tcr(const SecondOrderSystem& system, const CollocationScheme& scheme, std::span<const double> q0,
                        std::span<const double> p0, double t_end);
RunResult integrate_rkn(const SecondOrderSystem& system, const CollocationScheme& scheme, std::span<const double> q0,
                        std::span<const double> p0, double t_end);

}  // namespace expcol

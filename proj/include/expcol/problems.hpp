#pragma once

// Benchmark problems: Duffing, the averaged wind-induced oscillation, the
// pseudospectral NLS semidiscretization and a stiff gradient testbed.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "expcol/linalg.hpp"
#include "expcol/system.hpp"

namespace expcol {

enum class ReferenceKind { closed_form, elliptic, self_convergence };

std::string_view to_string(ReferenceKind k);

using ParameterRecord = std::map<std::string, double>;

struct ProblemInstance {
  std::string name;
  ParameterRecord parameters;
  SemilinearSystem system;
  /// Present when the problem also has a q'' + Omega q = -grad U(q) form whose
  /// (q, p) layout matches `system`.
  std::optional<SecondOrderSystem> second_order;
  Vector initial_state;
  ReferenceKind reference = ReferenceKind::self_convergence;
  /// Exact solution for closed_form / elliptic references.
  std::function<Vector(double)> exact;

  bool has_exact() const noexcept { return static_cast<bool>(exact); }
};

/// y = (q, p), q(t) = sn(omega t; k/omega). Requires omega > 0, 0 <= k < omega.
ProblemInstance duffing(double omega, double k);

/// x(0) = (0, 1). rho >= 0, 0 <= theta <= pi/2.
ProblemInstance wind(double theta, double rho);

/// Periodic second-derivative matrix on x_j = j L / N.
Matrix pseudospectral_d2(int n, double length);

/// y = (p, q) on an N-point grid, psi(x, 0) = 0.5 + 0.025 cos(mu x). N even, N >= 8.
ProblemInstance nls_semidiscrete(int n);

enum class GradientPotential { zero, quartic };

/// y' = -(M y + grad V(y)), M = diag(spectrum), V = 0 or 1/4 sum (y_i^2 - 1)^2,
/// y0 = (0.5, ..., 0.5).
ProblemInstance stiff_gradient(const Vector& spectrum, GradientPotential potential);

/// "duffing", "wind", "nls", "stiff-gradient".
const std::vector<std::string>& problem_names();

/// Default parameter record of a catalog problem.
ParameterRecord default_parameters(const std::string& name);

/// Builds a catalog problem. Parameters not in `overrides` take their
/// defaults; `spectrum` overrides the stiff-gradient diagonal. Unknown names
/// or parameters throw InputError.
ProblemInstance make_problem(const std::string& name, const ParameterRecord& overrides = {},
                             const std::optional<Vector>& spectrum = std::nullopt);

}  // namespace expcol

#pragma once

// Problem types:
//
//   y' = A y + g(y),  optionally with A = Q M, g = Q grad V and energy
//   H(y) = 1/2 y^T M y + V(y)                                  (SemilinearSystem)
//
//   q'' - N q' + Omega q = -grad U(q),
//   H(q,p) = 1/2 p^T p + 1/2 q^T Omega q + U(q)                (SecondOrderSystem)

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "expcol/linalg.hpp"

namespace expcol {

/// out = f(y); out is pre-sized to the system dimension.
using VectorField = std::function<void(std::span<const double> y, std::span<double> out)>;
using ScalarField = std::function<double(std::span<const double> y)>;

enum class Classification { conservative, dissipative, gradient, generic };

std::string_view to_string(Classification c);

/// The (Q, M, V) decomposition behind A = Q M and g = Q grad V.
struct Structure {
  Matrix q;
  Matrix m;
  ScalarField v;
  VectorField grad_v;
};

struct SemilinearSystem {
  Matrix a;
  VectorField g;  // empty means g == 0
  std::optional<Structure> structure;
  ScalarField energy;  // empty means no energy
  Classification classification = Classification::generic;

  std::size_t dimension() const noexcept { return a.rows(); }
  bool has_nonlinearity() const noexcept { return static_cast<bool>(g); }
  bool has_energy() const noexcept { return static_cast<bool>(energy); }

  Vector eval_g(std::span<const double> y) const;
  void eval_g(std::span<const double> y, std::span<double> out) const;
  double eval_energy(std::span<const double> y) const;
};

/// Builds A = Q M, g = Q grad V and, unless an explicit energy is given,
/// H = 1/2 y^T M y + V(y).
SemilinearSystem make_structured_system(Matrix q, Matrix m, ScalarField v, VectorField grad_v,
                                        Classification classification, ScalarField energy = {});

/// Linear system y' = A y (g == 0, no energy).
SemilinearSystem make_linear_system(Matrix a);

/// Checks the structural invariants at the given sample states and throws
/// InputError describing the first violation:
///  - A = Q M to 1e-12 (relative to max |A|), g = Q grad V to 1e-10,
///  - H = 1/2 y^T M y + V(y), grad V against central differences of V (1e-6),
///  - conservative => Q skew, dissipative => Q negative semidefinite,
///    gradient => Q = -I.
void validate_structure(const SemilinearSystem& system, std::span<const Vector> samples);

struct SecondOrderSystem {
  Matrix omega;
  std::optional<Matrix> damping;  // N, symmetric negative semidefinite
  VectorField grad_u;             // empty means U == 0
  ScalarField u;
  /// Omega = Mbar^{-1} Kbar from a multi-frequency problem; symmetry is not required.
  bool multi_frequency = false;

  std::size_t dimension() const noexcept { return omega.rows(); }
  bool has_potential() const noexcept { return static_cast<bool>(grad_u); }
  bool undamped() const;

  Vector eval_grad_u(std::span<const double> q) const;
  void eval_grad_u(std::span<const double> q, std::span<double> out) const;
  double energy(std::span<const double> q, std::span<const double> p) const;
};

/// Checks Omega symmetry (unless multi_frequency), N symmetry and sign, and
/// grad U against central differences of U at the sample points.
void validate_second_order(const SecondOrderSystem& system, std::span<const Vector> samples);

/// (q, p)' = [[0, I], [-I, N]] grad H(q, p): the block first-order form with
/// A = [[0, I], [-Omega, N]] and g = (0, -grad U(q)).
SemilinearSystem to_first_order(const SecondOrderSystem& system);

/// Omega moved into the potential: Omega' = 0, grad U' = Omega q + grad U.
SecondOrderSystem absorb_stiffness(const SecondOrderSystem& system);

/// Trajectory plus per-step fixed-point diagnostics.
struct RunResult {
  Vector times;
  std::vector<Vector> states;
  Vector energies;  // empty when the system has no energy
  std::vector<int> iterations;
  Vector residuals;
  std::vector<std::uint8_t> converged;

  std::size_t steps() const noexcept { return iterations.size(); }
  std::size_t nonconverged_steps() const;
};

/// Raised when a trajectory becomes non-finite or leaves any sane range.
/// Carries everything computed up to the failing step.
class NumericBlowup : public std::runtime_error {
 public:
  NumericBlowup(const std::string& what, RunResult partial, std::size_t step)
      : std::runtime_error(what), partial_(std::move(partial)), step_(step) {}
  const RunResult& partial() const noexcept { return partial_; }
  std::size_t step() const noexcept { return step_; }

 private:
  RunResult partial_;
  std::size_t step_;
};

/// True when y is finite and within 1e100 * max(1, scale).
bool state_is_sane(std::span<const double> y, double scale);

/// Number of steps covering [0, T] with stepsize h: round(T/h) when T/h is an
/// integer to 1e-9 relative, ceil(T/h) otherwise.
std::size_t step_count(double t_end, double h);

}  // namespace expcol

#pragma once

#include <span>

#include "expcol/linalg.hpp"
#include "expcol/system.hpp"

namespace expcol {

/// y(T) from an adaptive embedded Runge-Kutta-Fehlberg 7(8) integration of
/// y' = A y + g(y) with absolute and relative tolerance `tol`.
Vector reference_solution(const SemilinearSystem& system, std::span<const double> y0, double t_end,
                          double tol = 1e-12);

/// Classical explicit fourth-order Runge-Kutta on y' = A y + g(y), same output
/// layout as integrate(). Throws NumericBlowup once the state leaves the sane range.
RunResult baseline_rk4(const SemilinearSystem& system, std::span<const double> y0, double h, double t_end);

}  // namespace expcol

#pragma once

// Experiment driver behind the expcol CLI: single runs, convergence studies
// and energy / Lyapunov monitoring, written as CSV plus a JSON summary.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "expcol/errors.hpp"
#include "expcol/problems.hpp"
#include "expcol/system.hpp"

namespace expcol {

/// Bad problem name, method, parameter or stepsize list. CLI exit code 2.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

enum class Method { ecr, tcr, rkn, baseline_rk4 };

std::string_view to_string(Method m);
/// "ecr", "tcr", "rkn", "baseline-rk4"; anything else throws ConfigError.
Method parse_method(const std::string& name);

struct ExperimentConfig {
  std::string problem = "duffing";
  ParameterRecord parameters;  // overrides of the catalog defaults
  std::optional<Vector> spectrum;
  Method method = Method::ecr;
  int r = 2;
  Vector stepsizes{0.01};
  double t_end = 10.0;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  bool dense = false;
  int max_iterations = 5;
  double tolerance = 1e-16;
  unsigned threads = 1;

  /// Stepsizes positive and strictly descending, T > 0, r in range, method
  /// applicable to the problem. Throws ConfigError.
  void validate(const ProblemInstance& problem) const;
};

ProblemInstance build_problem(const ExperimentConfig& config);

/// Integrates with the configured method at stepsize h. Trajectory states use
/// the layout of problem.system. Throws NumericBlowup with the partial run.
RunResult run_method(const ProblemInstance& problem, const ExperimentConfig& config, double h);

struct RunSummary {
  double h = 0.0;
  std::size_t steps = 0;
  double energy0 = 0.0;
  double max_energy_drift = 0.0;  // max |H - H0|, 0 without an energy
  std::size_t nonconverged_steps = 0;
  std::optional<double> exact_error;  // max-norm at T when an exact solution exists
  bool blowup = false;
  std::size_t blowup_step = 0;
};

/// trajectory.csv, energy.csv, diagnostics.csv (and dense.csv with --dense)
/// plus summary.json. Requires exactly one stepsize. Blowups are reported in
/// the summary after the partial output is written.
RunSummary run(const ExperimentConfig& config);

struct ConvergenceRow {
  double h = 0.0;
  std::size_t steps = 0;
  double error = 0.0;  // max-norm endpoint error
  double max_energy_defect = 0.0;
  std::size_t nonconverged_steps = 0;
  double roundoff_floor = 0.0;  // error level reachable by rounding alone
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // sorted by descending h
  std::string reference_source;      // closed-form, elliptic or self-convergence
  double reference_h = 0.0;          // stepsize of the self-convergence reference
  std::optional<double> reference_crosscheck;  // |self reference - adaptive reference|
  double slope = 0.0;      // least squares of log(error) against log(T/h)
  double order = 0.0;      // -slope
  double r_squared = 0.0;
  bool meaningful = true;  // false when the errors sit at roundoff
  std::string note;
};

/// Slope, intercept and R^2 of the least-squares line through (x_i, y_i).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fits the rows of a report in place (slope, order, R^2, meaningful). The
/// fit is flagged when fewer than two rows lie above their roundoff floor.
void fit_order(ConvergenceReport& report, double t_end);

/// eps * scale * max(1e3, steps): rounding accumulated over `steps` steps.
double roundoff_floor(double scale, std::size_t steps);

/// convergence.csv and summary.json. Needs at least three stepsizes.
ConvergenceReport converge(const ExperimentConfig& config);

/// Number of trajectory states used as starting points for the one-step defect.
inline constexpr std::size_t kDefectStartPoints = 16;

struct EnergyReport {
  double h = 0.0;
  double energy0 = 0.0;
  Vector times;
  Vector defects;  // H(y_n) - H(y_0)
  double max_abs_defect = 0.0;
  double first_half_max = 0.0;
  double second_half_max = 0.0;
  bool monotonicity_checked = false;  // dissipative and gradient systems
  std::size_t monotonicity_violations = 0;
  double slack = 1e-10;
  double one_step_defect = 0.0;       // mean |H(y_1) - H(y_0)| at h over the start points
  double one_step_defect_half = 0.0;  // same at h/2
  double halving_ratio = 0.0;
};

/// Energy behaviour along the configured run at the first stepsize.
EnergyReport analyze_energy(const ProblemInstance& problem, const ExperimentConfig& config, const RunResult& run,
                            double h);

/// energy_study.csv and summary.json at the first stepsize.
EnergyReport energy_study(const ExperimentConfig& config);

/// Output directory override read by the CLI.
inline constexpr const char* kOutDirEnv = "EXPCOL_OUT_DIR";

}  // namespace expcol

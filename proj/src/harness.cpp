#include "expcol/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <json.hpp>

#include "expcol/basis.hpp"
#include "expcol/ecr.hpp"
#include "expcol/oscillatory.hpp"
#include "expcol/reference.hpp"

namespace expcol {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::ecr:
      return "ecr";
    case Method::tcr:
      return "tcr";
    case Method::rkn:
      return "rkn";
    case Method::baseline_rk4:
      return "baseline-rk4";
  }
  return "ecr";
}

Method parse_method(const std::string& name) {
  if (name == "ecr") return Method::ecr;
  if (name == "tcr") return Method::tcr;
  if (name == "rkn") return Method::rkn;
  if (name == "baseline-rk4") return Method::baseline_rk4;
  throw ConfigError("unknown method '" + name + "' (expected ecr, tcr, rkn or baseline-rk4)");
}

void ExperimentConfig::validate(const ProblemInstance& instance) const {
  if (stepsizes.empty()) throw ConfigError("at least one stepsize is required");
  for (std::size_t i = 0; i < stepsizes.size(); ++i) {
    if (!(stepsizes[i] > 0.0) || !std::isfinite(stepsizes[i])) throw ConfigError("stepsizes must be positive");
    if (i > 0 && !(stepsizes[i] < stepsizes[i - 1])) throw ConfigError("stepsizes must be strictly descending");
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("T must be positive");
  if (r < 1 || r > kMaxBasisOrder) throw ConfigError("r must lie in [1, " + std::to_string(kMaxBasisOrder) + "]");
  if (max_iterations < 1) throw ConfigError("max-iter must be >= 1");
  if (!(tolerance >= 0.0)) throw ConfigError("tol must be >= 0");
  if ((method == Method::tcr || method == Method::rkn) && !instance.second_order) {
    throw ConfigError(std::string(to_string(method)) + " needs a second-order problem; '" + instance.name +
                      "' has none");
  }
  if (dense && method != Method::ecr) throw ConfigError("dense output is available for ecr only");
}

ProblemInstance build_problem(const ExperimentConfig& config) {
  try {
    return make_problem(config.problem, config.parameters, config.spectrum);
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
}

namespace {

CollocationScheme scheme_for(const ExperimentConfig& config, double h) {
  CollocationScheme s = CollocationScheme::make(config.r, h);
  s.max_iterations = config.max_iterations;
  s.tolerance = config.tolerance;
  return s;
}

std::span<const double> head(const Vector& y, std::size_t d) { return std::span<const double>(y).first(d); }
std::span<const double> tail(const Vector& y, std::size_t d) { return std::span<const double>(y).subspan(d, d); }

double max_drift(const RunResult& res) {
  double m = 0.0;
  for (double e : res.energies) m = std::max(m, std::abs(e - res.energies.front()));
  return m;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  template <typename... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << values, first = false), ...);
    out_ << '\n';
  }

  void row_with(std::initializer_list<double> lead, std::span<const double> rest) {
    bool first = true;
    for (double v : lead) {
      out_ << (first ? "" : ",") << v;
      first = false;
    }
    for (double v : rest) {
      out_ << (first ? "" : ",") << v;
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

std::vector<std::string> state_header(std::initializer_list<std::string> lead, std::size_t d) {
  std::vector<std::string> h(lead);
  for (std::size_t i = 0; i < d; ++i) h.push_back("y" + std::to_string(i));
  return h;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json config_json(const ExperimentConfig& config, const ProblemInstance& problem) {
  json j;
  j["problem"] = problem.name;
  json params = json::object();
  for (const auto& [k, v] : problem.parameters) params[k] = v;
  j["parameters"] = params;
  if (config.spectrum) j["spectrum"] = *config.spectrum;
  j["classification"] = std::string(to_string(problem.system.classification));
  j["method"] = std::string(to_string(config.method));
  j["r"] = config.r;
  j["stepsizes"] = config.stepsizes;
  j["t_end"] = config.t_end;
  j["seed"] = config.seed;
  j["max_iterations"] = config.max_iterations;
  j["tolerance"] = config.tolerance;
  return j;
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_run_files(const fs::path& dir, const RunResult& res) {
  const std::size_t d = res.states.empty() ? 0 : res.states.front().size();
  CsvWriter traj(dir / "trajectory.csv", state_header({"t"}, d));
  for (std::size_t n = 0; n < res.states.size(); ++n) traj.row_with({res.times[n]}, res.states[n]);
  if (!res.energies.empty()) {
    CsvWriter energy(dir / "energy.csv", {"t", "H", "H_minus_H0"});
    for (std::size_t n = 0; n < res.energies.size(); ++n) {
      energy.row(res.times[n], res.energies[n], res.energies[n] - res.energies.front());
    }
  }
  CsvWriter diag(dir / "diagnostics.csv", {"step", "iterations", "residual", "converged"});
  for (std::size_t n = 0; n < res.steps(); ++n) {
    diag.row(n + 1, res.iterations[n], res.residuals[n], static_cast<int>(res.converged[n]));
  }
}

void write_dense(const fs::path& dir, const ProblemInstance& problem, const ExperimentConfig& config, double h,
                 const RunResult& res) {
  const std::size_t d = problem.system.dimension();
  CsvWriter dense(dir / "dense.csv", state_header({"t", "tau"}, d));
  const CollocationScheme scheme = scheme_for(config, h);
  const CoefficientTable table = build_coefficients(problem.system, scheme);
  for (std::size_t n = 0; n + 1 < res.states.size(); ++n) {
    const double hn = res.times[n + 1] - res.times[n];
    if (std::abs(hn - h) > 1e-12 * h) break;  // shortened final step
    const StepResult st = step(problem.system, scheme, table, res.states[n]);
    for (double tau : {0.25, 0.5, 0.75}) {
      const Vector u = dense_output(problem.system, scheme, table, res.states[n], st.stages, tau);
      dense.row_with({res.times[n] + tau * h, tau}, u);
    }
  }
}

}  // namespace

RunResult run_method(const ProblemInstance& problem, const ExperimentConfig& config, double h) {
  const Vector& y0 = problem.initial_state;
  switch (config.method) {
    case Method::ecr:
      return integrate(problem.system, scheme_for(config, h), y0, config.t_end);
    case Method::tcr: {
      if (!problem.second_order) throw ConfigError("tcr needs a second-order problem");
      const std::size_t d = problem.second_order->dimension();
      return integrate_tcr(*problem.second_order, scheme_for(config, h), head(y0, d), tail(y0, d), config.t_end);
    }
    case Method::rkn: {
      if (!problem.second_order) throw ConfigError("rkn needs a second-order problem");
      const std::size_t d = problem.second_order->dimension();
      const SecondOrderSystem flat = absorb_stiffness(*problem.second_order);
      RunResult res = integrate_rkn(flat, scheme_for(config, h), head(y0, d), tail(y0, d), config.t_end);
      return res;
    }
    case Method::baseline_rk4:
      return baseline_rk4(problem.system, y0, h, config.t_end);
  }
  throw ConfigError("unknown method");
}

RunSummary run(const ExperimentConfig& config) {
  const ProblemInstance problem = build_problem(config);
  config.validate(problem);
  if (config.stepsizes.size() != 1) throw ConfigError("run takes exactly one stepsize");
  const double h = config.stepsizes.front();
  prepare_out_dir(config.out_dir);

  RunSummary summary;
  summary.h = h;
  RunResult res;
  try {
    res = run_method(problem, config, h);
  } catch (const NumericBlowup& e) {
    res = e.partial();
    summary.blowup = true;
    summary.blowup_step = e.step();
  }
  summary.steps = res.steps();
  summary.energy0 = res.energies.empty() ? 0.0 : res.energies.front();
  summary.max_energy_drift = max_drift(res);
  summary.nonconverged_steps = res.nonconverged_steps();
  if (!summary.blowup && problem.has_exact()) {
    summary.exact_error = max_abs_diff(res.states.back(), problem.exact(res.times.back()));
  }

  write_run_files(config.out_dir, res);
  if (config.dense && !summary.blowup) write_dense(config.out_dir, problem, config, h, res);

  json j = config_json(config, problem);
  j["study"] = "run";
  j["status"] = summary.blowup ? "blowup" : "ok";
  if (summary.blowup) j["blowup_step"] = summary.blowup_step;
  j["steps"] = summary.steps;
  j["energy0"] = summary.energy0;
  j["max_energy_drift"] = summary.max_energy_drift;
  j["nonconverged_steps"] = summary.nonconverged_steps;
  j["error_norm"] = "max";
  if (summary.exact_error) j["exact_error"] = *summary.exact_error;
  if (config.method == Method::ecr) {
    const StepsizeAdvisory adv = stepsize_guard(problem.system, scheme_for(config, h), problem.initial_state);
    j["stepsize_advisory"] = {{"unconditional", adv.unconditional}, {"m0", adv.m0},         {"d0", adv.d0},
                              {"d1", adv.d1},                       {"radius", adv.radius}, {"threshold", adv.threshold},
                              {"beta", adv.beta},                   {"warn", adv.warn},     {"message", adv.message}};
  }
  write_json(config.out_dir / "summary.json", j);
  return summary;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InputError("fit_line: x values coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

double roundoff_floor(double scale, std::size_t steps) {
  return std::numeric_limits<double>::epsilon() * std::max(1.0, scale) * std::max(1e3, static_cast<double>(steps));
}

void fit_order(ConvergenceReport& report, double t_end) {
  Vector x;
  Vector y;
  std::size_t resolved = 0;
  for (const ConvergenceRow& row : report.rows) {
    if (!(row.error > 0.0) || !std::isfinite(row.error)) {
      report.meaningful = false;
      report.note = "order fit not meaningful: zero or non-finite error";
      report.slope = report.order = report.r_squared = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    if (row.error > row.roundoff_floor) ++resolved;
    x.push_back(std::log(t_end / row.h));
    y.push_back(std::log(row.error));
  }
  const LineFit f = fit_line(x, y);
  report.slope = f.slope;
  report.order = -f.slope;
  report.r_squared = f.r_squared;
  if (resolved < 2) {
    report.meaningful = false;
    report.note = "order fit not meaningful: errors at roundoff level";
  } else if (resolved < report.rows.size()) {
    report.note = std::to_string(report.rows.size() - resolved) + " of " + std::to_string(report.rows.size()) +
                  " errors at roundoff level";
  }
}

ConvergenceReport converge(const ExperimentConfig& config) {
  const ProblemInstance problem = build_problem(config);
  config.validate(problem);
  if (config.stepsizes.size() < 3) throw ConfigError("converge needs at least three stepsizes");
  prepare_out_dir(config.out_dir);

  Vector hs = config.stepsizes;
  std::sort(hs.begin(), hs.end(), std::greater<>());

  ConvergenceReport report;
  report.reference_source = std::string(to_string(problem.reference));
  Vector reference;
  std::size_t reference_steps = 0;
  std::optional<std::string> failure;
  std::size_t failure_step = 0;
  if (problem.has_exact()) {
    reference = problem.exact(config.t_end);
  } else {
    report.reference_h = hs.back() / 8.0;
    try {
      const RunResult ref = run_method(problem, config, report.reference_h);
      reference = ref.states.back();
      reference_steps = ref.steps();
    } catch (const NumericBlowup& e) {
      failure = std::string("reference run: ") + e.what();
      failure_step = e.step();
    }
    const double stiffness = norm_inf(problem.system.a) * config.t_end;
    if (!failure && stiffness <= 1e5) {
      const Vector adaptive = reference_solution(problem.system, problem.initial_state, config.t_end, 1e-12);
      report.reference_crosscheck = max_abs_diff(reference, adaptive);
    }
  }

  std::vector<RunResult> runs(hs.size());
  std::vector<std::string> errors(hs.size());
  auto task = [&](std::size_t i) {
    try {
      runs[i] = run_method(problem, config, hs[i]);
    } catch (const NumericBlowup& e) {
      runs[i] = e.partial();
      errors[i] = e.what();
    }
  };
  if (!failure) {
    if (config.threads > 1) {
      std::vector<std::future<void>> pending;
      for (std::size_t i = 0; i < hs.size(); ++i) {
        if (pending.size() >= config.threads) {
          pending.front().get();
          pending.erase(pending.begin());
        }
        pending.push_back(std::async(std::launch::async, task, i));
      }
      for (auto& f : pending) f.get();
    } else {
      for (std::size_t i = 0; i < hs.size(); ++i) task(i);
    }
  }

  for (std::size_t i = 0; i < hs.size() && !failure; ++i) {
    if (!errors[i].empty()) {
      failure = errors[i];
      failure_step = runs[i].steps();
      break;
    }
    ConvergenceRow row;
    row.h = hs[i];
    row.steps = runs[i].steps();
    row.error = max_abs_diff(runs[i].states.back(), reference);
    row.max_energy_defect = max_drift(runs[i]);
    row.nonconverged_steps = runs[i].nonconverged_steps();
    row.roundoff_floor = roundoff_floor(norm_inf(reference), row.steps + reference_steps);
    report.rows.push_back(row);
  }

  if (!failure) fit_order(report, config.t_end);

  {
    CsvWriter csv(config.out_dir / "convergence.csv",
                  {"h", "T_over_h", "steps", "error", "roundoff_floor", "max_energy_defect", "nonconverged_steps"});
    for (const ConvergenceRow& row : report.rows) {
      csv.row(row.h, config.t_end / row.h, row.steps, row.error, row.roundoff_floor, row.max_energy_defect,
              row.nonconverged_steps);
    }
  }
  json j = config_json(config, problem);
  j["study"] = "converge";
  j["status"] = failure ? "blowup" : "ok";
  j["error_norm"] = "max";
  j["reference_source"] = report.reference_source;
  if (report.reference_h > 0.0) j["reference_h"] = report.reference_h;
  if (report.reference_crosscheck) j["reference_crosscheck"] = *report.reference_crosscheck;
  json rows = json::array();
  for (const ConvergenceRow& row : report.rows) {
    rows.push_back({{"h", row.h},
                    {"error", row.error},
                    {"roundoff_floor", row.roundoff_floor},
                    {"max_energy_defect", row.max_energy_defect}});
  }
  j["rows"] = rows;
  j["slope"] = report.slope;
  j["order"] = report.order;
  j["r_squared"] = report.r_squared;
  j["meaningful"] = report.meaningful;
  if (!report.note.empty()) j["note"] = report.note;
  if (failure) j["failure"] = *failure;
  write_json(config.out_dir / "summary.json", j);

  if (failure) {
    RunResult partial;
    throw NumericBlowup(*failure, partial, failure_step);
  }
  return report;
}

EnergyReport analyze_energy(const ProblemInstance& problem, const ExperimentConfig& config, const RunResult& res,
                            double h) {
  if (!problem.system.has_energy()) throw ConfigError("problem '" + problem.name + "' has no energy function");
  EnergyReport rep;
  rep.h = h;
  rep.energy0 = res.energies.front();
  rep.times = res.times;
  const std::size_t n = res.energies.size();
  const std::size_t mid = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double dlt = res.energies[i] - rep.energy0;
    rep.defects.push_back(dlt);
    rep.max_abs_defect = std::max(rep.max_abs_defect, std::abs(dlt));
    if (i <= mid) {
      rep.first_half_max = std::max(rep.first_half_max, std::abs(dlt));
    } else {
      rep.second_half_max = std::max(rep.second_half_max, std::abs(dlt));
    }
  }
  const Classification c = problem.system.classification;
  rep.monotonicity_checked = c == Classification::dissipative || c == Classification::gradient;
  if (rep.monotonicity_checked) {
    for (std::size_t i = 1; i < n; ++i) {
      if (res.energies[i] > res.energies[i - 1] + rep.slack) ++rep.monotonicity_violations;
    }
  }

  // one-step defects summed over start points spread along the run
  ExperimentConfig one = config;
  const std::size_t points = std::min<std::size_t>(kDefectStartPoints, n);
  ProblemInstance start = problem;
  for (std::size_t k = 0; k < points; ++k) {
    const std::size_t idx = points > 1 ? k * (n - 1) / (points - 1) : 0;
    start.initial_state = res.states[idx];
    one.t_end = h;
    const RunResult a = run_method(start, one, h);
    one.t_end = h / 2.0;
    const RunResult b = run_method(start, one, h / 2.0);
    rep.one_step_defect += std::abs(a.energies.back() - a.energies.front());
    rep.one_step_defect_half += std::abs(b.energies.back() - b.energies.front());
  }
  rep.one_step_defect /= static_cast<double>(points);
  rep.one_step_defect_half /= static_cast<double>(points);
  rep.halving_ratio = rep.one_step_defect_half > 0.0 ? rep.one_step_defect / rep.one_step_defect_half
                                                     : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

EnergyReport energy_study(const ExperimentConfig& config) {
  const ProblemInstance problem = build_problem(config);
  config.validate(problem);
  if (!problem.system.has_energy()) throw ConfigError("problem '" + problem.name + "' has no energy function");
  prepare_out_dir(config.out_dir);
  const double h = config.stepsizes.front();

  RunResult res;
  std::optional<NumericBlowup> blowup;
  try {
    res = run_method(problem, config, h);
  } catch (const NumericBlowup& e) {
    res = e.partial();
    blowup = e;
  }
  EnergyReport rep;
  if (!blowup) {
    rep = analyze_energy(problem, config, res, h);
  } else {
    rep.h = h;
    rep.energy0 = res.energies.empty() ? 0.0 : res.energies.front();
    rep.times = res.times;
    for (double e : res.energies) rep.defects.push_back(e - rep.energy0);
  }

  {
    CsvWriter csv(config.out_dir / "energy_study.csv", {"t", "H", "defect", "increment"});
    for (std::size_t i = 0; i < rep.defects.size(); ++i) {
      const double inc = i == 0 ? 0.0 : rep.defects[i] - rep.defects[i - 1];
      csv.row(rep.times[i], rep.energy0 + rep.defects[i], rep.defects[i], inc);
    }
  }
  json j = config_json(config, problem);
  j["study"] = "energy";
  j["status"] = blowup ? "blowup" : "ok";
  j["h"] = h;
  j["energy0"] = rep.energy0;
  j["max_abs_defect"] = rep.max_abs_defect;
  j["first_half_max"] = rep.first_half_max;
  j["second_half_max"] = rep.second_half_max;
  j["monotonicity_checked"] = rep.monotonicity_checked;
  j["monotonicity_violations"] = rep.monotonicity_violations;
  j["slack"] = rep.slack;
  j["one_step_defect"] = rep.one_step_defect;
  j["one_step_defect_half"] = rep.one_step_defect_half;
  j["halving_ratio"] = rep.halving_ratio;
  write_json(config.out_dir / "summary.json", j);
  if (blowup) throw *blowup;
  return rep;
}

}  // namespace expcol

// expcol: command-line front end for the exponential collocation toolkit.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "expcol/harness.hpp"
#include "expcol/problems.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;

// Maps a config entry to the long option it feeds. [problem] name and
// [method] name select the problem and method; every other key is its own
// option name with '_' read as '-'.
std::string option_for(const CLI::ConfigItem& item) {
  std::string name = item.name;
  for (char& c : name) {
    if (c == '_') c = '-';
  }
  if (name == "name" && item.parents.size() == 1) {
    if (item.parents[0] == "problem") return "--problem";
    if (item.parents[0] == "method") return "--method";
  }
  return "--" + name;
}

void apply_config_file(CLI::App& app, const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw expcol::ConfigError("cannot read config file " + path + ": " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    const std::string flag = option_for(item);
    CLI::Option* opt = app.get_option_no_throw(flag);
    if (opt == nullptr || flag == "--config") {
      throw expcol::ConfigError("unknown config key '" + item.fullname() + "'");
    }
    if (opt->count() > 0) continue;  // command-line flags win
    try {
      for (const std::string& v : item.inputs) opt->add_result(v);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw expcol::ConfigError("bad value for '" + item.fullname() + "': " + e.what());
    }
  }
}

void print_report(const expcol::ConvergenceReport& rep) {
  std::cout << "reference: " << rep.reference_source;
  if (rep.reference_h > 0.0) std::cout << " (h = " << rep.reference_h << ")";
  std::cout << "\n";
  if (rep.reference_crosscheck) std::cout << "adaptive cross-check: " << *rep.reference_crosscheck << "\n";
  for (const auto& row : rep.rows) std::cout << "h = " << row.h << "  error = " << row.error << "\n";
  if (rep.meaningful) {
    std::cout << "order = " << rep.order << "  R^2 = " << rep.r_squared << "\n";
    if (!rep.note.empty()) std::cout << rep.note << "\n";
  } else {
    std::cout << rep.note << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential collocation integrators and benchmark studies"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();

  std::string problem = "duffing";
  std::string method = "ecr";
  std::string config_path;
  std::string out_dir = "out";
  std::string potential;
  expcol::ExperimentConfig cfg;
  std::vector<double> hs;
  std::vector<double> spectrum;
  double omega = 0.0, k = 0.0, theta = 0.0, rho = 0.0;
  int grid_n = 0;

  auto* run_cmd = app.add_subcommand("run", "Single integration: trajectory, energy and diagnostics CSV");
  auto* conv_cmd = app.add_subcommand("converge", "Convergence study over several stepsizes");
  auto* energy_cmd = app.add_subcommand("energy", "Energy / Lyapunov monitoring and defect order");
  auto* list_cmd = app.add_subcommand("list-problems", "List catalog problems and their defaults");

  app.add_option("--config", config_path, "TOML-style config file; command-line flags take precedence");
  app.add_option("--problem", problem, "duffing | wind | nls | stiff-gradient");
  app.add_option("--method", method, "ecr | tcr | rkn | baseline-rk4");
  app.add_option("--r", cfg.r, "Collocation order r");
  app.add_option("--h", hs, "Stepsize; repeat for a study (descending)");
  app.add_option("--t-end", cfg.t_end, "Integration horizon T");
  auto* out_opt = app.add_option("--out", out_dir, std::string("Output directory (default: $") + expcol::kOutDirEnv +
                                                       " or ./out)");
  app.add_option("--seed", cfg.seed, "Seed recorded with the study");
  app.add_flag("--dense", cfg.dense, "Also write dense output at tau = 1/4, 1/2, 3/4 (ecr)");
  app.add_option("--max-iter", cfg.max_iterations, "Fixed-point iteration budget per step");
  app.add_option("--tol", cfg.tolerance, "Fixed-point tolerance");
  app.add_option("--threads", cfg.threads, "Concurrent runs within a convergence study");
  auto* omega_opt = app.add_option("--omega", omega, "duffing: omega");
  auto* k_opt = app.add_option("--k", k, "duffing: k");
  auto* theta_opt = app.add_option("--theta", theta, "wind: theta in [0, pi/2]");
  auto* rho_opt = app.add_option("--rho", rho, "wind: rho");
  auto* n_opt = app.add_option("--grid-n", grid_n, "nls: grid size N");
  auto* spec_opt = app.add_option("--spectrum", spectrum, "stiff-gradient: diagonal of M");
  auto* pot_opt = app.add_option("--potential", potential, "stiff-gradient: zero | quartic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (list_cmd->parsed()) {
    for (const std::string& name : expcol::problem_names()) {
      std::cout << name;
      for (const auto& [key, value] : expcol::default_parameters(name)) std::cout << " " << key << "=" << value;
      std::cout << "\n";
    }
    return 0;
  }

  try {
    if (!config_path.empty()) apply_config_file(app, config_path);
    if (out_opt->count() == 0) {
      if (const char* env = std::getenv(expcol::kOutDirEnv); env != nullptr && *env != '\0') out_dir = env;
    }
    cfg.problem = problem;
    cfg.method = expcol::parse_method(method);
    cfg.out_dir = out_dir;
    if (!hs.empty()) cfg.stepsizes = hs;
    if (omega_opt->count()) cfg.parameters["omega"] = omega;
    if (k_opt->count()) cfg.parameters["k"] = k;
    if (theta_opt->count()) cfg.parameters["theta"] = theta;
    if (rho_opt->count()) cfg.parameters["rho"] = rho;
    if (n_opt->count()) cfg.parameters["n"] = grid_n;
    if (spec_opt->count()) cfg.spectrum = spectrum;
    if (pot_opt->count()) {
      if (potential != "zero" && potential != "quartic") throw expcol::ConfigError("potential must be zero or quartic");
      cfg.parameters["quartic"] = potential == "quartic" ? 1.0 : 0.0;
    }

    if (run_cmd->parsed()) {
      const expcol::RunSummary s = expcol::run(cfg);
      std::cout << "steps: " << s.steps << "\nmax |H - H0|: " << s.max_energy_drift << "\n";
      if (s.exact_error) std::cout << "error at T: " << *s.exact_error << "\n";
      if (s.nonconverged_steps) std::cout << "non-converged steps: " << s.nonconverged_steps << "\n";
      if (s.blowup) {
        std::cerr << "numeric blowup at step " << s.blowup_step << "; partial output written to " << out_dir << "\n";
        return kExitBlowup;
      }
    } else if (conv_cmd->parsed()) {
      print_report(expcol::converge(cfg));
    } else if (energy_cmd->parsed()) {
      const expcol::EnergyReport rep = expcol::energy_study(cfg);
      std::cout << "max |H - H0|: " << rep.max_abs_defect << "\n";
      if (rep.monotonicity_checked) std::cout << "monotonicity violations: " << rep.monotonicity_violations << "\n";
      std::cout << "one-step defect ratio h/(h/2): " << rep.halving_ratio << "\n";
    }
  } catch (const expcol::NumericBlowup& e) {
    std::cerr << "numeric blowup: " << e.what() << "\n";
    return kExitBlowup;
  } catch (const expcol::InputError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}

// Command-line front end: run, sweep, scenarios, check.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "congestion/runner.hpp"

namespace cg = congestion;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

cg::RunConfig load(const std::string& path, const std::vector<std::string>& overrides,
                   const std::string& out_dir) {
  std::vector<std::string> all = overrides;
  if (!out_dir.empty()) all.push_back("output.dir=" + out_dir);
  return cg::load_config(path, all);
}

void print_issues(const cg::ConfigError& e) {
  std::cerr << (dynamic_cast<const cg::ParseError*>(&e) ? "parse error" : "validation error")
            << ":\n";
  for (const auto& i : e.issues()) {
    std::cerr << "  " << i.key;
    if (i.line > 0) std::cerr << " (line " << i.line << ")";
    std::cerr << ": " << i.reason << "\n";
  }
}

void print_violations(const cg::ValidationReport& rep) {
  constexpr std::size_t kShown = 10;
  // Domain-wide problems (no cell index) first.
  std::vector<cg::InitialViolation> v = rep.violations;
  std::stable_partition(v.begin(), v.end(), [](const auto& x) { return x.i < 0; });
  for (std::size_t k = 0; k < v.size() && k < kShown; ++k) std::cerr << "  " << v[k].message << "\n";
  if (v.size() > kShown) std::cerr << "  ... and " << v.size() - kShown << " more\n";
}

int cmd_check(const cg::RunConfig& cfg) {
  const cg::CheckReport rep = cg::check_config(cfg);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  if (!rep.error.empty()) {
    std::cerr << "invalid setup: " << rep.error << "\n";
    return kExitValidation;
  }
  std::cout << "mean density M0 = " << rep.initial.mean_density
            << ", inf rho_star = " << rep.initial.barrier_inf << "\n";
  if (!rep.ok) {
    std::cerr << "initial data rejected:\n";
    print_violations(rep.initial);
    return kExitValidation;
  }
  std::cout << "ok\n";
  return kExitOk;
}

int cmd_run(const cg::RunConfig& cfg) {
  const cg::CheckReport rep = cg::check_config(cfg);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  if (!rep.ok) {
    std::cerr << "initial data rejected"
              << (rep.error.empty() ? "" : ": " + rep.error) << "\n";
    print_violations(rep.initial);
    return kExitValidation;
  }
  const cg::RunResult r = cg::run_once(cfg);
  std::cout << "steps " << r.stats.steps << ", rejected " << r.stats.rejected << ", max ratio "
            << r.stats.max_ratio << ", wall " << r.wall_time << " s\n"
            << "outputs in " << cfg.output.dir << "\n";
  if (!r.ok) {
    std::cerr << r.error_kind << ": " << r.error << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_sweep(const cg::RunConfig& cfg) {
  const cg::CheckReport rep = cg::check_config(cfg);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  if (!rep.ok) {
    std::cerr << "initial data rejected\n";
    return kExitValidation;
  }
  const cg::SweepResult s = cg::run_sweep(cfg);
  bool failed = false;
  for (const auto& row : s.rows) {
    std::cout << row.label << ": " << (row.ok ? "ok" : "FAILED " + row.error)
              << ", complementarity " << row.complementarity_integral << ", pi "
              << row.pi_integral << ", lmp " << row.lmp_mean << "\n";
    failed = failed || !row.ok;
  }
  for (const auto& c : s.checks)
    std::cout << "check " << c.name << ": "
              << (c.applicable ? (c.holds ? "holds" : "violated") : "not applicable") << " ("
              << c.detail << ")\n";
  std::cout << "outputs in " << cfg.output.dir << "\n";
  return failed ? kExitSolver : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressible flow with congestion constraints"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--override", overrides, "section.key=value, repeatable")
        ->allow_extra_args(false);
  };
  CLI::App* run = app.add_subcommand("run", "run one configuration");
  CLI::App* sweep = app.add_subcommand("sweep", "run the configured parameter sweep");
  CLI::App* check = app.add_subcommand("check", "validate a configuration and its initial data");
  CLI::App* list = app.add_subcommand("scenarios", "list built-in scenarios");
  add_common(run);
  add_common(sweep);
  add_common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (list->parsed()) {
    for (const auto& name : cg::scenario_names()) {
      const cg::Scenario sc = cg::make_scenario(name);
      std::cout << name << "  dim=" << sc.grid.dim << " law=" << cg::law_kind(sc.law)
                << " barrier=" << cg::barrier_kind(sc.barrier) << " t_end=" << sc.t_end << "\n";
    }
    return kExitOk;
  }

  try {
    const cg::RunConfig cfg = load(config_path, overrides, out_dir);
    if (check->parsed()) return cmd_check(cfg);
    if (run->parsed()) return cmd_run(cfg);
    return cmd_sweep(cfg);
  } catch (const cg::ConfigError& e) {
    print_issues(e);
    return kExitValidation;
  } catch (const cg::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const cg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

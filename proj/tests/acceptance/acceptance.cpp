// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
//
//   acceptance [--only 1,4,7] [--cli path/to/congestion] [--work DIR]

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "congestion/runner.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace congestion;

namespace {

struct Outcome {
  bool pass = false;
  std::vector<std::string> details;
};

struct Context {
  fs::path work;
  std::string cli;
};

const std::vector<double> kEps = {1e-2, 1e-3, 1e-4};

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

RunConfig scenario_config(const std::string& scenario, double eps, const fs::path& dir) {
  RunConfig cfg = parse_config("scenario = " + scenario + "\n");
  std::visit(
      [eps](auto& law) {
        if constexpr (requires { law.eps; }) law.eps = eps;
      },
      cfg.setup.law);
  cfg.output.dir = dir.string();
  cfg.output.snapshots = false;
  return cfg;
}

// ---------------------------------------------------------------------------
// Criteria 1-3 share one run per (scenario, eps).

struct ScenarioRun {
  std::string scenario;
  double eps = 0.0;
  RunResult result;
  double barrier_tol = 0.0;
};

const std::vector<ScenarioRun>& scenario_runs(const Context& ctx) {
  static std::vector<ScenarioRun> runs;
  if (!runs.empty()) return runs;
  for (const auto& name : scenario_names()) {
    if (name == "manufactured_1d") continue;
    for (double eps : kEps) {
      ScenarioRun r;
      r.scenario = name;
      r.eps = eps;
      const RunConfig cfg = scenario_config(name, eps, ctx.work / "runs" / (name + "_" + fmt(eps)));
      r.barrier_tol = cfg.solver.barrier_tol;
      r.result = run_once(cfg, {.write_files = false});
      std::cerr << "  ran " << name << " eps=" << eps << " in " << fmt(r.result.wall_time) << " s\n";
      runs.push_back(std::move(r));
    }
  }
  return runs;
}

bool records_finite(const std::vector<DiagnosticsRecord>& recs) {
  for (const auto& r : recs)
    for (double v : {r.t, r.energy, r.dissipation_rate, r.mass, r.min_density, r.max_ratio, r.pi_l1,
                     r.complementarity, r.divu_total})
      if (!std::isfinite(v)) return false;
  return true;
}

Outcome barrier_invariant(const Context& ctx) {
  Outcome out{true, {}};
  for (const auto& run : scenario_runs(ctx)) {
    const auto& res = run.result;
    double worst_ratio = 0.0;
    double min_rho = 1e300;
    for (const auto& rec : res.records) {
      worst_ratio = std::max(worst_ratio, rec.max_ratio);
      min_rho = std::min(min_rho, rec.min_density);
    }
    const bool two_d = make_scenario(run.scenario).grid.dim == 2;
    const double budget = two_d ? 600.0 : 120.0;
    const bool ok = res.ok && records_finite(res.records) && min_rho >= 0.0 &&
                    worst_ratio <= 1.0 - run.barrier_tol && res.wall_time < budget;
    out.pass = out.pass && ok;
    out.details.push_back(run.scenario + " eps=" + fmt(run.eps) + ": " + (res.ok ? "ok" : res.error) +
                          ", states " + std::to_string(res.records.size()) + ", min rho " +
                          fmt(min_rho) + ", max ratio " + fmt(worst_ratio, 6) + ", rejected " +
                          std::to_string(res.stats.rejected) + ", wall " + fmt(res.wall_time) +
                          " s (limit " + fmt(budget) + ")");
  }
  return out;
}

Outcome mass_conservation(const Context& ctx) {
  Outcome out{true, {}};
  double worst = 0.0;
  for (const auto& run : scenario_runs(ctx)) {
    const double drift = max_mass_drift(run.result.records);
    worst = std::max(worst, drift);
    out.pass = out.pass && run.result.ok && drift <= 1e-12;
    out.details.push_back(run.scenario + " eps=" + fmt(run.eps) + ": max relative drift " +
                          fmt(drift));
  }
  out.details.push_back("worst " + fmt(worst) + " (limit 1e-12)");
  return out;
}

Outcome energy_inequality(const Context& ctx) {
  Outcome out{true, {}};
  for (const auto& run : scenario_runs(ctx)) {
    const double rel = energy_budget(run.result.records).relative();
    out.pass = out.pass && run.result.ok && rel <= 1e-3;
    out.details.push_back("potential " + run.scenario + " eps=" + fmt(run.eps) +
                          ": cumulative positive residual / E(0) = " + fmt(rel));
  }
  // The direct force form is reported for comparison only.
  for (const auto& name : {"traffic_1d", "lane_narrowing_1d", "pipe_1d"}) {
    for (double eps : kEps) {
      RunConfig cfg = scenario_config(name, eps, ctx.work / "direct");
      cfg.solver.force_form = ForceForm::Direct;
      const RunResult r = run_once(cfg, {.write_files = false});
      const std::string rel = r.ok ? fmt(energy_budget(r.records).relative()) : r.error_kind;
      out.details.push_back(std::string("direct    ") + name + " eps=" + fmt(eps) +
                            ": cumulative positive residual / E(0) = " + rel);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criteria 4-6: the traffic eps sweep.

const SweepResult& traffic_sweep(const Context& ctx) {
  static std::optional<SweepResult> sweep;
  if (sweep) return *sweep;
  RunConfig cfg = parse_config("scenario = traffic_1d\n");
  cfg.output.dir = (ctx.work / "traffic_sweep").string();
  cfg.output.snapshots = false;
  cfg.sweep.param = SweepParam::Eps;
  cfg.sweep.eps = kEps;
  sweep = run_sweep(cfg);
  return *sweep;
}

std::string row_line(const SweepRow& r, const std::string& name, double value) {
  return "eps=" + fmt(r.eps) + ": " + name + " " + fmt(value, 6) + (r.ok ? "" : " [run failed: " + r.error + "]");
}

Outcome complementarity_trend(const Context& ctx) {
  const SweepResult& s = traffic_sweep(ctx);
  Outcome out;
  std::vector<double> vals;
  bool all_ok = s.rows.size() == kEps.size();
  for (const auto& r : s.rows) {
    vals.push_back(r.complementarity_integral);
    all_ok = all_ok && r.ok;
    out.details.push_back(row_line(r, "int int (rho_star - rho) pi", r.complementarity_integral));
  }
  const double factor = vals.size() > 1 && vals.back() > 0 ? vals.front() / vals.back() : 0.0;
  out.pass = all_ok && strictly_decreasing(vals) && factor >= 5.0;
  out.details.push_back("strictly decreasing: " + std::string(strictly_decreasing(vals) ? "yes" : "no") +
                        ", end-to-end factor " + fmt(factor) + " (need >= 5)");
  return out;
}

Outcome congested_incompressibility(const Context& ctx) {
  const SweepResult& s = traffic_sweep(ctx);
  Outcome out;
  std::vector<double> congested;
  bool all_ok = s.rows.size() == kEps.size();
  for (const auto& r : s.rows) {
    all_ok = all_ok && r.ok;
    std::string line = row_line(r, "mean LMP ratio", r.lmp_mean) + " over " +
                       std::to_string(r.congested_snapshots) + " congested states";
    for (std::size_t k = 0; k < r.lmp_by_delta_c.size() && k < s.delta_c.size(); ++k)
      line += ", delta_c " + fmt(s.delta_c[k]) + " -> " + fmt(r.lmp_by_delta_c[k]);
    out.details.push_back(line);
    if (r.congested_snapshots > 0) congested.push_back(r.lmp_mean);
  }
  out.pass = all_ok && congested.size() >= 2 && strictly_decreasing(congested);
  out.details.push_back("runs with congestion: " + std::to_string(congested.size()) +
                        ", strictly decreasing: " + (strictly_decreasing(congested) ? "yes" : "no"));
  return out;
}

Outcome pressure_integrability(const Context& ctx) {
  const SweepResult& s = traffic_sweep(ctx);
  Outcome out;
  double lo = 1e300;
  double hi = 0.0;
  bool all_ok = s.rows.size() == kEps.size();
  for (const auto& r : s.rows) {
    all_ok = all_ok && r.ok;
    lo = std::min(lo, r.pi_integral);
    hi = std::max(hi, r.pi_integral);
    out.details.push_back(row_line(r, "int int pi", r.pi_integral));
  }
  const double spread = lo > 0 ? hi / lo : INFINITY;
  out.pass = all_ok && spread <= 10.0;
  out.details.push_back("max/min " + fmt(spread) + " (limit 10)");
  return out;
}

// ---------------------------------------------------------------------------

Outcome manufactured_convergence(const Context& ctx) {
  Outcome out{true, {}};
  std::vector<double> e_rho, e_m;
  const std::vector<int> sizes = {100, 200, 400};
  for (int n : sizes) {
    RunConfig cfg = parse_config("scenario = manufactured_1d\n", {"grid.nx=" + std::to_string(n)});
    cfg.output.dir = (ctx.work / ("manufactured_" + std::to_string(n))).string();
    cfg.output.snapshots = false;
    const RunResult r = run_once(cfg, {.write_files = false});
    if (!r.ok || !r.manufactured_l1_rho) {
      out.pass = false;
      out.details.push_back("N=" + std::to_string(n) + ": run failed " + r.error);
      return out;
    }
    e_rho.push_back(*r.manufactured_l1_rho);
    e_m.push_back(*r.manufactured_l1_m);
    out.details.push_back("N=" + std::to_string(n) + " t=" + fmt(r.final_state.t) + ": L1(rho) " +
                          fmt(e_rho.back()) + ", L1(m) " + fmt(e_m.back()));
  }
  for (std::size_t k = 1; k < sizes.size(); ++k) {
    const double p_rho = std::log2(e_rho[k - 1] / e_rho[k]);
    const double p_m = std::log2(e_m[k - 1] / e_m[k]);
    out.pass = out.pass && p_rho >= 0.8 && p_m >= 0.8;
    out.details.push_back("order " + std::to_string(sizes[k - 1]) + "->" + std::to_string(sizes[k]) +
                          ": rho " + fmt(p_rho) + ", m " + fmt(p_m) + " (need >= 0.8)");
  }
  return out;
}

Outcome pressure_oracles(const Context&) {
  Outcome out;
  const std::vector<double> ratios = {0.05, 0.2, 0.3, 0.5, 0.7, 0.85, 0.9, 0.95, 0.99};
  double quad_err = 0.0;
  for (int alpha = 2; alpha <= 5; ++alpha)
    for (int beta = 1; beta <= 5; ++beta) {
      const PressureLaw law = Singular{1e-3, double(alpha), double(beta)};
      for (double r : ratios) {
        const double g = oracle::integrate([&](double s) { return eval_pi(law, s) / (s * s); }, 0, r);
        const double q = oracle::integrate([&](double s) { return eval_dpi(law, s) / s; }, 0, r);
        quad_err = std::max({quad_err, std::abs(eval_Gamma(law, r) - g) / std::abs(g),
                             std::abs(eval_Q(law, r) - q) / std::abs(q)});
      }
    }

  const std::vector<PressureLaw> laws = {Singular{1e-3, 2, 4}, Singular{1e-2, 3, 3},
                                         Singular{1e-4, 2.5, 3.5}, Barotropic{1, 2.5},
                                         Sedimentation{1, 3, 0.64}};
  double fd_err = 0.0;
  double identity_err = 0.0;
  for (const auto& law : laws)
    for (double r : ratios) {
      if (std::holds_alternative<Sedimentation>(law) && r >= 0.63) continue;
      const double h = 1e-3 * std::min(r, 1.0 - r);
      const double dpi = oracle::derivative([&](double s) { return eval_pi(law, s); }, r, h);
      fd_err = std::max(fd_err, std::abs(eval_dpi(law, r) - dpi) / std::abs(dpi));
      const double dg = oracle::derivative([&](double s) { return eval_Gamma(law, s); }, r, h);
      const double q = eval_Q(law, r);
      identity_err = std::max(identity_err, std::abs(eval_Gamma(law, r) + r * dg - q) / std::abs(q));
    }

  long ordering_violations = 0;
  const std::vector<double> deltas = {0.2, 0.1, 0.05, 0.025, 0.01};
  for (int k = 0; k <= 1500; ++k) {
    const double r = k * 1e-3;
    for (std::size_t d = 1; d < deltas.size(); ++d)
      if (eval_pi(Truncated{1e-3, 3, 3, 1e-2, 6, deltas[d]}, r) <
          eval_pi(Truncated{1e-3, 3, 3, 1e-2, 6, deltas[d - 1]}, r))
        ++ordering_violations;
  }

  out.pass = quad_err <= 1e-10 && fd_err <= 1e-6 && identity_err <= 1e-8 && ordering_violations == 0;
  out.details = {"Gamma/Q closed form vs quadrature: max rel error " + fmt(quad_err) + " (limit 1e-10)",
                 "pi' vs finite differences, r <= 0.99: max rel error " + fmt(fd_err) + " (limit 1e-6)",
                 "Gamma + r Gamma' = Q: max rel error " + fmt(identity_err) + " (limit 1e-8)",
                 "truncation ordering violations on r in [0, 1.5]: " + std::to_string(ordering_violations)};
  return out;
}

// L1 distance between the transported ratio and rho / rho_star at t_end.
double ratio_transport_error(int n) {
  const RunConfig cfg = parse_config("scenario = lane_narrowing_1d\n", {"grid.nx=" + std::to_string(n)});
  const Scenario& sc = cfg.setup;
  const BarrierField barrier = build_barrier(sc.barrier, sc.grid);
  const FlowState s0 = make_initial_state(sc.initial, sc.grid, barrier);
  Field R = congestion_ratio(s0, barrier);
  const double vacuum = kVacuumFraction * barrier.sup;
  AdvanceSink sink;
  sink.on_step = [&](const FlowState& before, double dt, const FlowState&) {
    R = step_ratio(R, velocity(before, vacuum), dt, barrier, sc.grid);
  };
  const AdvanceResult res = advance(s0, sc.t_end, sc.law, sc.fluid, barrier, cfg.solver, sink);
  double err = 0.0;
  for (int i = 0; i < sc.grid.nx(); ++i)
    err += std::abs(R(i) - res.state.rho(i) / barrier.values(i)) * sc.grid.dx();
  return err;
}

Outcome ratio_equation(const Context&) {
  Outcome out;
  const double e100 = ratio_transport_error(100);
  const double e200 = ratio_transport_error(200);
  const double e400 = ratio_transport_error(400);
  const double q = e200 / e400;
  out.pass = q >= 1.5 && q <= 2.5;
  out.details = {"L1 error N=100: " + fmt(e100) + ", N=200: " + fmt(e200) + ", N=400: " + fmt(e400),
                 "reduction 100->200: " + fmt(e100 / e200) + ", 200->400: " + fmt(q) +
                     " (need 2 +- 25% at the reference step 200->400)"};
  return out;
}

int run_cli(const Context& ctx, const fs::path& config) {
  const std::string cmd = "\"" + ctx.cli + "\" check \"" + config.string() + "\" > \"" +
                          (ctx.work / "cli.log").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome initial_gate(const Context& ctx) {
  Outcome out{true, {}};
  if (ctx.cli.empty()) return {false, {"no --cli path given"}};
  const fs::path dir = ctx.work / "gate";
  fs::create_directories(dir);
  struct Case {
    std::string name;
    std::string text;
    int expected;
  };
  const std::vector<Case> cases = {
      {"mean above inf rho_star", "scenario = lane_narrowing_1d\n[initial]\nkind = barrier_fill\nfraction = 0.9\n", 2},
      {"pointwise above rho_star", "scenario = traffic_1d\n[initial]\namp = 0.8\n", 2},
      {"negative density", "scenario = traffic_1d\n[initial]\nbase = 0.3\namp = -0.5\n", 2},
      {"uniform 0.65 in a 0.6 lane", "scenario = lane_narrowing_1d\n[initial]\nrho = 0.65\n", 2},
      {"admissible control", "scenario = lane_narrowing_1d\n", 0},
  };
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const fs::path p = dir / ("case_" + std::to_string(k) + ".ini");
    std::ofstream(p) << cases[k].text;
    const int code = run_cli(ctx, p);
    out.pass = out.pass && code == cases[k].expected;
    out.details.push_back(cases[k].name + ": exit " + std::to_string(code) + " (expected " +
                          std::to_string(cases[k].expected) + ")");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Context ctx;
  ctx.work = fs::temp_directory_path() / "congestion_acceptance";
  std::set<int> only;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--cli" && a + 1 < argc) {
      ctx.cli = argv[++a];
    } else if (arg == "--work" && a + 1 < argc) {
      ctx.work = argv[++a];
    } else if (arg == "--only" && a + 1 < argc) {
      std::stringstream ss(argv[++a]);
      for (std::string item; std::getline(ss, item, ',');) only.insert(std::stoi(item));
    } else {
      std::cerr << "usage: acceptance [--only 1,2,...] [--cli PATH] [--work DIR]\n";
      return 2;
    }
  }
  fs::create_directories(ctx.work);

  const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria = {
      {"barrier invariant", barrier_invariant},
      {"mass conservation", mass_conservation},
      {"energy inequality", energy_inequality},
      {"complementarity trend", complementarity_trend},
      {"congested incompressibility", congested_incompressibility},
      {"pressure integrability", pressure_integrability},
      {"manufactured convergence", manufactured_convergence},
      {"pressure oracles", pressure_oracles},
      {"ratio equation", ratio_equation},
      {"initial-data gate", initial_gate},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[k].second(ctx);
    } catch (const std::exception& e) {
      o = {false, {std::string("exception: ") + e.what()}};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << criteria[k].first << "\n";
    for (const auto& d : o.details) std::cout << "      " << d << "\n";
    std::cout.flush();
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}

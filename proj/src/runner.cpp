#include "congestion/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "congestion/format.hpp"

#ifndef CONGESTION_VERSION
#define CONGESTION_VERSION "unknown"
#endif

namespace congestion {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string error_kind_of(const std::exception& e) {
  if (dynamic_cast<const StepFailure*>(&e)) return "StepFailure";
  if (dynamic_cast<const NonFinite*>(&e)) return "NonFinite";
  if (dynamic_cast<const DegenerateState*>(&e)) return "DegenerateState";
  if (dynamic_cast<const BarrierViolation*>(&e)) return "BarrierViolation";
  if (dynamic_cast<const QuadratureFailure*>(&e)) return "QuadratureFailure";
  if (dynamic_cast<const ParameterError*>(&e)) return "ParameterError";
  if (dynamic_cast<const SpecError*>(&e)) return "SpecError";
  return "Error";
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw IoError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json grid_json(const Grid& g) {
  return {{"dim", g.dim},
          {"nx", g.nx()},
          {"ny", g.ny()},
          {"lx", g.extents[0]},
          {"ly", g.dim == 2 ? g.extents[1] : 0.0}};
}

json law_json(const PressureLaw& law) {
  json j = {{"kind", std::string(law_kind(law))}};
  if (const auto* s = std::get_if<Singular>(&law)) {
    j["eps"] = s->eps;
    j["alpha"] = s->alpha;
    j["beta"] = s->beta;
  } else if (const auto* b = std::get_if<Barotropic>(&law)) {
    j["a"] = b->a;
    j["gamma_n"] = b->gamma_n;
  } else if (const auto* t = std::get_if<Truncated>(&law)) {
    j["eps"] = t->eps;
    j["alpha"] = t->alpha;
    j["beta"] = t->beta;
    j["kappa"] = t->kappa;
    j["cap_K"] = t->cap_K;
    j["delta"] = t->delta;
  } else if (const auto* d = std::get_if<Sedimentation>(&law)) {
    j["c0"] = d->c0;
    j["s_exp"] = d->s_exp;
    j["phi_star"] = d->phi_star;
  }
  return j;
}

void write_snapshot(const fs::path& dir, int index, const FlowState& s, const BarrierField& bar,
                    const PressureLaw& law) {
  const Grid& g = s.grid;
  const Velocity vel = velocity(s, kVacuumFraction * bar.sup);
  std::ostringstream stem;
  stem << "snap_" << std::setw(4) << std::setfill('0') << index;
  json meta = {{"index", index}, {"t", s.t}, {"grid", grid_json(g)}, {"law", law_json(law)}};

  if (g.dim == 1) {
    std::ofstream out = open_out(dir / (stem.str() + ".csv"));
    out << "x,rho,u,rho_star,ratio\n";
    for (int i = 0; i < g.nx(); ++i) {
      out << format_double(g.xc(i)) << ',' << format_double(s.rho(i, 0)) << ','
          << format_double(vel.u(i, 0)) << ',' << format_double(bar.values(i, 0)) << ','
          << format_double(s.rho(i, 0) / bar.values(i, 0)) << '\n';
    }
    meta["files"] = {{"table", stem.str() + ".csv"}};
    meta["columns"] = {"x", "rho", "u", "rho_star", "ratio"};
  } else {
    auto field_file = [&](const std::string& name, auto value) {
      const std::string file = stem.str() + "_" + name + ".csv";
      std::ofstream out = open_out(dir / file);
      for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) out << (i ? "," : "") << format_double(value(i, j));
        out << '\n';
      }
      meta["files"][name] = file;
    };
    field_file("rho", [&](int i, int j) { return s.rho(i, j); });
    field_file("u", [&](int i, int j) { return vel.u(i, j); });
    field_file("v", [&](int i, int j) { return vel.v(i, j); });
    field_file("rho_star", [&](int i, int j) { return bar.values(i, j); });
    field_file("ratio", [&](int i, int j) { return s.rho(i, j) / bar.values(i, j); });
    meta["layout"] = "row-major, one row per y index j, columns over x index i";
  }
  write_text(dir / (stem.str() + ".json"), meta.dump(2) + "\n");
}

double max_cell_pi(const FlowState& s, const PressureLaw& law, const BarrierField& bar) {
  double m = 0.0;
  for (int j = 0; j < s.grid.ny(); ++j)
    for (int i = 0; i < s.grid.nx(); ++i)
      m = std::max(m, eval_pi(law, std::max(s.rho(i, j) / bar.values(i, j), 0.0)));
  return m;
}

bool ordering_holds(const FlowState& s, const Truncated& law, const BarrierField& bar,
                    const std::vector<double>& smaller_deltas) {
  for (double d : smaller_deltas) {
    if (!(d < law.delta)) continue;
    Truncated tighter = law;
    tighter.delta = d;
    for (int j = 0; j < s.grid.ny(); ++j) {
      for (int i = 0; i < s.grid.nx(); ++i) {
        const double r = std::max(s.rho(i, j) / bar.values(i, j), 0.0);
        const double wide = eval_pi(law, r);
        const double tight = eval_pi(tighter, r);
        if (tight < wide * (1.0 - 1e-12)) return false;
      }
    }
  }
  return true;
}

std::string label_for(const RunConfig& member, SweepParam p) {
  if (p == SweepParam::KappaDelta) {
    const auto& t = std::get<Truncated>(member.setup.law);
    return "kappa_" + format_double(t.kappa) + "_delta_" + format_double(t.delta);
  }
  if (const auto* s = std::get_if<Singular>(&member.setup.law)) return "eps_" + format_double(s->eps);
  return "eps_" + format_double(std::get<Truncated>(member.setup.law).eps);
}

json budget_json(const BudgetReport& b) {
  return {{"max_positive", b.max_positive},
          {"cumulative_positive", b.cumulative_positive},
          {"initial_energy", b.initial_energy},
          {"relative", b.relative()}};
}

}  // namespace

CheckReport check_config(const RunConfig& cfg) {
  CheckReport rep;
  rep.warnings = law_warnings(cfg.setup.law);
  try {
    cfg.setup.grid.validate();
    const BarrierField bar = build_barrier(cfg.setup.barrier, cfg.setup.grid);
    const InitialData data = make_initial_data(cfg.setup.initial, cfg.setup.grid, bar);
    rep.initial = validate_initial(data, bar, cfg.setup.grid);
    rep.ok = rep.initial.valid;
  } catch (const Error& e) {
    rep.ok = false;
    rep.error = e.what();
  }
  return rep;
}

RunResult run_once(const RunConfig& cfg, const RunOptions& options) {
  const fs::path dir = cfg.output.dir;
  const fs::path snap_dir = dir / "snapshots";
  if (options.write_files) {
    ensure_writable(dir);
    if (cfg.output.snapshots) ensure_writable(snap_dir);
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunResult res;
  const Scenario& sc = cfg.setup;
  const BarrierField bar = build_barrier(sc.barrier, sc.grid);
  FlowState state = make_initial_state(sc.initial, sc.grid, bar);
  SolverConfig solver = cfg.solver;
  solver.t_end = cfg.solver.t_end;

  SourceFn source_fn;
  const auto* manufactured = std::get_if<ManufacturedSolution>(&sc.initial);
  if (manufactured) {
    const ManufacturedSolution ms = *manufactured;
    const double length = sc.grid.extents[0];
    const PressureLaw law = sc.law;
    const FluidParams fluid = sc.fluid;
    const BarrierSpec barrier = sc.barrier;
    source_fn = [=](double t, double x, double) {
      return manufactured_sources(ms, length, law, fluid, barrier, t, x);
    };
  }

  const auto& dcs = cfg.sweep.delta_c;
  std::vector<double> lmp_sum(dcs.size(), 0.0);
  std::vector<int> lmp_count(dcs.size(), 0);
  const auto* truncated = std::get_if<Truncated>(&sc.law);

  auto record = [&](const FlowState& s) {
    if (!res.records.empty() && res.records.back().t == s.t) return;
    res.records.push_back(make_record(s, sc.law, sc.fluid, bar, cfg.output.delta_c));
    res.max_pi = std::max(res.max_pi, max_cell_pi(s, sc.law, bar));
    if (truncated && !options.ordering_deltas.empty() &&
        !ordering_holds(s, *truncated, bar, options.ordering_deltas))
      res.truncation_ordering = false;
    for (std::size_t k = 0; k < dcs.size(); ++k) {
      const CongestionMetrics m = congestion_metrics(s, sc.law, bar, dcs[k]);
      if (m.congested_measure > 0.0) {
        lmp_sum[k] += m.divu_congested / (m.divu_total + kLmpFloor);
        ++lmp_count[k];
      }
    }
  };

  int snapshot_index = 0;
  auto snapshot = [&](const FlowState& s) {
    if (options.write_files && cfg.output.snapshots)
      write_snapshot(snap_dir, snapshot_index, s, bar, sc.law);
    ++snapshot_index;
  };

  long accepted = 0;
  AdvanceSink sink;
  sink.on_state = [&](const FlowState& s) {
    if (!res.records.empty() && s.t == res.records.back().t) return;
    ++accepted;
    if (accepted % cfg.output.diagnostics_every == 0) record(s);
  };

  record(state);
  snapshot(state);
  const double t_end = solver.t_end;
  try {
    int k = 1;
    while (state.t < t_end) {
      double target = k * solver.snapshot_every;
      if (target > t_end * (1.0 - 1e-12)) target = t_end;
      AdvanceResult adv =
          advance(state, target, sc.law, sc.fluid, bar, solver, sink, manufactured ? &source_fn : nullptr);
      res.stats.steps += adv.stats.steps;
      res.stats.rejected += adv.stats.rejected;
      res.stats.max_ratio = std::max(res.stats.max_ratio, adv.stats.max_ratio);
      if (adv.stats.steps > 0)
        res.stats.min_dt = res.stats.min_dt > 0.0 ? std::min(res.stats.min_dt, adv.stats.min_dt)
                                                  : adv.stats.min_dt;
      state = std::move(adv.state);
      record(state);
      snapshot(state);
      ++k;
    }
  } catch (const Error& e) {
    res.ok = false;
    res.error_kind = error_kind_of(e);
    res.error = e.what();
  }

  for (std::size_t k = 0; k < dcs.size(); ++k)
    res.lmp_by_delta_c.push_back(lmp_count[k] ? lmp_sum[k] / lmp_count[k] : 0.0);

  if (manufactured && res.ok) {
    double e_rho = 0.0;
    double e_m = 0.0;
    for (int i = 0; i < sc.grid.nx(); ++i) {
      const auto exact = manufactured_fields(*manufactured, sc.grid.extents[0], state.t, sc.grid.xc(i));
      e_rho += std::abs(state.rho(i, 0) - exact.rho);
      e_m += std::abs(state.mx(i, 0) - exact.rho * exact.u);
    }
    res.manufactured_l1_rho = e_rho * sc.grid.dx();
    res.manufactured_l1_m = e_m * sc.grid.dx();
  }
  res.final_state = state;
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (options.write_files) {
    {
      std::ofstream out = open_out(dir / "diagnostics.csv");
      write_csv_header(out);
      for (const auto& r : res.records) write_csv_row(out, r);
      if (!out) throw IoError("write failed for diagnostics.csv");
    }
    const BudgetReport budget = energy_budget(res.records);
    const LmpReport lmp = lmp_crosscheck(res.records);
    json meta;
    meta["config_text"] = serialize_config(cfg);
    meta["scenario"] = cfg.scenario;
    meta["seed"] = cfg.seed;
    meta["grid"] = grid_json(sc.grid);
    meta["law"] = law_json(sc.law);
    meta["fluid"] = {{"mu", sc.fluid.mu},
                     {"lambda", sc.fluid.lambda},
                     {"gamma", sc.fluid.gamma},
                     {"p_coeff", sc.fluid.p_coeff}};
    meta["solver"] = {{"cfl", solver.cfl},
                      {"barrier_tol", solver.barrier_tol},
                      {"max_substeps", solver.max_substeps},
                      {"t_end", solver.t_end},
                      {"snapshot_every", solver.snapshot_every},
                      {"force_form", solver.force_form == ForceForm::Direct ? "direct" : "potential"}};
    meta["versions"] = {{"congestion", CONGESTION_VERSION},
                        {"cxx_standard", static_cast<long>(__cplusplus)},
                        {"compiler", __VERSION__},
                        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    meta["warnings"] = law_warnings(sc.law);
    meta["status"] = res.ok ? "ok" : "failed";
    meta["error"] = res.ok ? json(nullptr) : json({{"kind", res.error_kind}, {"message", res.error}});
    meta["wall_time"] = res.wall_time;
    meta["stats"] = {{"steps", res.stats.steps},
                     {"rejected", res.stats.rejected},
                     {"min_dt", res.stats.min_dt},
                     {"max_ratio", res.stats.max_ratio}};
    meta["records"] = res.records.size();
    meta["snapshots"] = snapshot_index;
    meta["energy_budget"] = budget_json(budget);
    meta["lmp"] = {{"mean_ratio", lmp.mean_ratio}, {"congested_snapshots", lmp.congested_snapshots}};
    if (!res.records.empty()) {
      meta["mass_drift"] = max_mass_drift(res.records);
    }
    if (res.manufactured_l1_rho)
      meta["manufactured_error"] = {{"l1_rho", *res.manufactured_l1_rho},
                                    {"l1_m", *res.manufactured_l1_m}};
    write_text(dir / "meta.json", meta.dump(2) + "\n");
  }
  return res;
}

std::vector<RunConfig> sweep_members(const RunConfig& cfg) {
  std::vector<RunConfig> members;
  const SweepPlan& plan = cfg.sweep;
  if (plan.param == SweepParam::Eps) {
    std::vector<double> eps = plan.eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    for (double e : eps) {
      RunConfig m = cfg;
      if (auto* s = std::get_if<Singular>(&m.setup.law)) s->eps = e;
      if (auto* t = std::get_if<Truncated>(&m.setup.law)) t->eps = e;
      members.push_back(std::move(m));
    }
  } else if (plan.param == SweepParam::KappaDelta) {
    auto pairs = plan.kappa_delta;
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first > b.first;
    });
    for (const auto& [kappa, delta] : pairs) {
      RunConfig m = cfg;
      auto& t = std::get<Truncated>(m.setup.law);
      t.kappa = kappa;
      t.delta = delta;
      members.push_back(std::move(m));
    }
  }
  for (auto& m : members) {
    m.output.dir = (fs::path(cfg.output.dir) / label_for(m, plan.param)).string();
    m.sweep.param = SweepParam::None;
    m.sweep.eps.clear();
    m.sweep.kappa_delta.clear();
  }
  return members;
}

const TrendCheck* SweepResult::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

SweepResult run_sweep(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.sweep.size() == 0) {
    const std::vector<ConfigIssue> issues = {{"sweep.param", 0, "no sweep plan configured"}};
    throw ValidationError("invalid configuration: no sweep plan configured", issues);
  }
  ensure_writable(cfg.output.dir);
  const std::vector<RunConfig> members = sweep_members(cfg);

  std::vector<double> deltas;
  if (cfg.sweep.param == SweepParam::KappaDelta)
    for (const auto& kd : cfg.sweep.kappa_delta) deltas.push_back(kd.second);

  SweepResult out;
  out.delta_c = cfg.sweep.delta_c;
  out.rows.resize(members.size());

  auto run_member = [&](std::size_t k) {
    const RunConfig& m = members[k];
    SweepRow& row = out.rows[k];
    row.label = label_for(m, cfg.sweep.param);
    if (const auto* s = std::get_if<Singular>(&m.setup.law)) row.eps = s->eps;
    if (const auto* t = std::get_if<Truncated>(&m.setup.law)) {
      row.eps = t->eps;
      row.kappa = t->kappa;
      row.delta = t->delta;
    }
    try {
      RunOptions opts;
      opts.ordering_deltas = deltas;
      const RunResult r = run_once(m, opts);
      row.ok = r.ok;
      row.error = r.error;
      row.wall_time = r.wall_time;
      row.max_pi = r.max_pi;
      row.truncation_ordering = r.truncation_ordering;
      row.lmp_by_delta_c = r.lmp_by_delta_c;
      if (!r.records.empty()) {
        row.final_max_ratio = r.records.back().max_ratio;
        row.mass_drift = max_mass_drift(r.records);
      }
      row.complementarity_integral = time_integral(r.records, &DiagnosticsRecord::complementarity);
      row.pi_integral = time_integral(r.records, &DiagnosticsRecord::pi_l1);
      const LmpReport lmp = lmp_crosscheck(r.records);
      row.lmp_mean = lmp.mean_ratio;
      row.congested_snapshots = lmp.congested_snapshots;
      double sum = 0.0;
      for (const auto& rec : r.records)
        if (rec.congested_measure > 0.0) sum += rec.divu_congested;
      row.mean_divu_congested = lmp.congested_snapshots ? sum / lmp.congested_snapshots : 0.0;
      row.budget_relative = energy_budget(r.records).relative();
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(cfg.sweep.workers, 1), members.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < members.size(); ++k) run_member(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < members.size(); k = next++) run_member(k);
      });
    for (auto& t : pool) t.join();
  }

  // Trend checks over the rows, in row order.
  const bool all_ok = std::all_of(out.rows.begin(), out.rows.end(), [](const SweepRow& r) { return r.ok; });
  const bool multi = out.rows.size() >= 2;
  auto add_check = [&](const std::string& name, bool applicable, bool holds, const std::string& detail) {
    out.checks.push_back({name, applicable, applicable && holds, detail});
  };
  auto column = [&](auto getter, bool congested_only) {
    std::vector<double> v;
    for (const auto& r : out.rows)
      if (!congested_only || r.congested_snapshots > 0) v.push_back(getter(r));
    return v;
  };
  auto describe = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " > " : "") + format_double(v[k]);
    return s;
  };

  if (cfg.sweep.param == SweepParam::Eps) {
    const auto comp = column([](const SweepRow& r) { return r.complementarity_integral; }, false);
    std::string detail = describe(comp);
    if (comp.size() >= 2 && comp.back() > 0.0)
      detail += "; end-to-end factor " + format_double(comp.front() / comp.back());
    add_check("complementarity_decreasing", multi && all_ok, strictly_decreasing(comp), detail);

    const auto divu = column([](const SweepRow& r) { return r.mean_divu_congested; }, true);
    add_check("divu_congested_decreasing", all_ok && divu.size() >= 2, strictly_decreasing(divu),
              describe(divu));
    const auto lmp = column([](const SweepRow& r) { return r.lmp_mean; }, true);
    add_check("lmp_decreasing", all_ok && lmp.size() >= 2, strictly_decreasing(lmp), describe(lmp));

    const auto pi = column([](const SweepRow& r) { return r.pi_integral; }, false);
    double ratio = 0.0;
    if (!pi.empty()) {
      const auto [lo, hi] = std::minmax_element(pi.begin(), pi.end());
      ratio = *lo > 0.0 ? *hi / *lo : INFINITY;
    }
    add_check("pi_integral_bounded", multi && all_ok, ratio <= 10.0,
              "max/min = " + format_double(ratio));
  } else {
    const auto mp = column([](const SweepRow& r) { return r.max_pi; }, false);
    bool monotone = true;
    for (std::size_t k = 1; k < mp.size(); ++k)
      if (mp[k] < mp[k - 1]) monotone = false;
    add_check("max_pi_nondecreasing", multi && all_ok, monotone, describe(mp));
    const bool ordering = std::all_of(out.rows.begin(), out.rows.end(),
                                      [](const SweepRow& r) { return r.truncation_ordering; });
    add_check("truncation_ordering", multi && all_ok, ordering,
              ordering ? "pi grows as delta shrinks on every recorded state"
                       : "ordering violated on some state");
  }

  // sweep.csv
  const fs::path dir = cfg.output.dir;
  {
    std::ofstream csv = open_out(dir / "sweep.csv");
    csv << "label,eps,kappa,delta,status,final_max_ratio,complementarity_integral,pi_integral,"
           "mean_divu_congested,lmp_mean,congested_snapshots,max_pi,truncation_ordering,"
           "budget_relative,mass_drift,wall_time";
    for (double d : out.delta_c) csv << ",lmp_dc_" << format_double(d);
    csv << '\n';
    for (const auto& r : out.rows) {
      csv << r.label << ',' << format_double(r.eps) << ',' << format_double(r.kappa) << ','
          << format_double(r.delta) << ',' << (r.ok ? "ok" : "failed") << ','
          << format_double(r.final_max_ratio) << ',' << format_double(r.complementarity_integral)
          << ',' << format_double(r.pi_integral) << ',' << format_double(r.mean_divu_congested)
          << ',' << format_double(r.lmp_mean) << ',' << r.congested_snapshots << ','
          << format_double(r.max_pi) << ',' << (r.truncation_ordering ? 1 : 0) << ','
          << format_double(r.budget_relative) << ',' << format_double(r.mass_drift) << ','
          << format_double(r.wall_time);
      for (std::size_t k = 0; k < out.delta_c.size(); ++k)
        csv << ',' << format_double(k < r.lmp_by_delta_c.size() ? r.lmp_by_delta_c[k] : 0.0);
      csv << '\n';
    }
    if (!csv) throw IoError("write failed for sweep.csv");
  }
  json j;
  j["param"] = cfg.sweep.param == SweepParam::Eps ? "eps" : "kappa_delta";
  j["delta_c"] = out.delta_c;
  for (const auto& r : out.rows)
    j["rows"].push_back({{"label", r.label}, {"status", r.ok ? "ok" : "failed"}, {"error", r.error}});
  for (const auto& c : out.checks)
    j["checks"].push_back(
        {{"name", c.name}, {"applicable", c.applicable}, {"holds", c.holds}, {"detail", c.detail}});
  write_text(dir / "sweep.json", j.dump(2) + "\n");
  return out;
}

}  // namespace congestion

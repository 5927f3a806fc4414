#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "congestion/runner.hpp"

namespace py = pybind11;
namespace cg = congestion;

namespace {

py::array_t<double> interior(const cg::Field& f) {
  const py::ssize_t ny = f.ny();
  const py::ssize_t nx = f.nx();
  py::array_t<double> out(ny == 1 ? std::vector<py::ssize_t>{nx} : std::vector<py::ssize_t>{ny, nx});
  double* p = out.mutable_data();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) *p++ = f(i, j);
  return out;
}

py::dict records_to_columns(const std::vector<cg::DiagnosticsRecord>& recs) {
  const auto& names = cg::diagnostics_columns();
  std::vector<std::vector<double>> cols(names.size());
  for (const auto& r : recs) {
    const std::vector<double> vals = cg::record_values(r);
    for (std::size_t k = 0; k < names.size(); ++k) cols[k].push_back(vals[k]);
  }
  py::dict d;
  for (std::size_t k = 0; k < names.size(); ++k)
    d[py::str(names[k])] = py::array_t<double>(static_cast<py::ssize_t>(cols[k].size()), cols[k].data());
  return d;
}

py::dict run_result_to_dict(const cg::RunResult& r) {
  py::dict d;
  d["ok"] = r.ok;
  d["error_kind"] = r.error_kind;
  d["error"] = r.error;
  d["records"] = records_to_columns(r.records);
  d["steps"] = r.stats.steps;
  d["rejected"] = r.stats.rejected;
  d["min_dt"] = r.stats.min_dt;
  d["max_ratio"] = r.stats.max_ratio;
  d["wall_time"] = r.wall_time;
  d["max_pi"] = r.max_pi;
  d["lmp_by_delta_c"] = r.lmp_by_delta_c;
  d["energy_budget_relative"] = cg::energy_budget(r.records).relative();
  d["mass_drift"] = cg::max_mass_drift(r.records);
  if (r.manufactured_l1_rho) {
    d["manufactured_l1_rho"] = *r.manufactured_l1_rho;
    d["manufactured_l1_m"] = *r.manufactured_l1_m;
  }
  py::dict fin;
  fin["t"] = r.final_state.t;
  if (r.final_state.rho.nx() > 0) {
    fin["rho"] = interior(r.final_state.rho);
    fin["mx"] = interior(r.final_state.mx);
    fin["my"] = interior(r.final_state.my);
  }
  d["final_state"] = fin;
  return d;
}

template <class Law>
void def_law_evaluators(py::class_<Law>& cls) {
  cls.def("pi", [](const Law& l, double r) { return cg::eval_pi(l, r); }, py::arg("r"))
      .def("dpi", [](const Law& l, double r) { return cg::eval_dpi(l, r); }, py::arg("r"))
      .def("Q", [](const Law& l, double r) { return cg::eval_Q(l, r); }, py::arg("r"))
      .def("Gamma", [](const Law& l, double r) { return cg::eval_Gamma(l, r); }, py::arg("r"))
      .def("validate", [](const Law& l) { cg::validate(cg::PressureLaw{l}); })
      .def("warnings", [](const Law& l) { return cg::law_warnings(l); })
      .def(py::self == py::self);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compressible flow with congestion constraints";

  auto base = py::register_exception<cg::Error>(m, "CongestionError", PyExc_RuntimeError);
  py::register_exception<cg::BarrierViolation>(m, "BarrierViolation", base.ptr());
  py::register_exception<cg::ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<cg::QuadratureFailure>(m, "QuadratureFailure", base.ptr());
  py::register_exception<cg::SpecError>(m, "SpecError", base.ptr());
  py::register_exception<cg::UnknownScenario>(m, "UnknownScenario", base.ptr());
  py::register_exception<cg::NonFinite>(m, "NonFinite", base.ptr());
  py::register_exception<cg::DegenerateState>(m, "DegenerateState", base.ptr());
  py::register_exception<cg::StepFailure>(m, "StepFailure", base.ptr());
  py::register_exception<cg::IoError>(m, "IoError", base.ptr());
  auto config_error = py::register_exception<cg::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<cg::ParseError>(m, "ParseError", config_error.ptr());
  py::register_exception<cg::ValidationError>(m, "ValidationError", config_error.ptr());

  py::class_<cg::Singular> singular(m, "Singular");
  singular.def(py::init<double, double, double>(), py::arg("eps") = 1e-3, py::arg("alpha") = 3.0,
               py::arg("beta") = 3.0)
      .def_readwrite("eps", &cg::Singular::eps)
      .def_readwrite("alpha", &cg::Singular::alpha)
      .def_readwrite("beta", &cg::Singular::beta)
      .def("gamma_lower_bound", [](const cg::Singular& l, double r) {
        const auto b = cg::gamma_lower_bound_check(l, r);
        return py::dict(py::arg("holds") = b.holds, py::arg("slack") = b.slack,
                        py::arg("c1") = b.c1, py::arg("c2") = b.c2);
      });
  def_law_evaluators(singular);

  py::class_<cg::Barotropic> barotropic(m, "Barotropic");
  barotropic.def(py::init<double, double>(), py::arg("a") = 1.0, py::arg("gamma_n") = 2.0)
      .def_readwrite("a", &cg::Barotropic::a)
      .def_readwrite("gamma_n", &cg::Barotropic::gamma_n);
  def_law_evaluators(barotropic);

  py::class_<cg::Truncated> truncated(m, "Truncated");
  truncated
      .def(py::init<double, double, double, double, double, double>(), py::arg("eps") = 1e-3,
           py::arg("alpha") = 3.0, py::arg("beta") = 3.0, py::arg("kappa") = 1e-2,
           py::arg("cap_K") = 6.0, py::arg("delta") = 0.05)
      .def_readwrite("eps", &cg::Truncated::eps)
      .def_readwrite("alpha", &cg::Truncated::alpha)
      .def_readwrite("beta", &cg::Truncated::beta)
      .def_readwrite("kappa", &cg::Truncated::kappa)
      .def_readwrite("cap_K", &cg::Truncated::cap_K)
      .def_readwrite("delta", &cg::Truncated::delta);
  def_law_evaluators(truncated);

  py::class_<cg::Sedimentation> sedimentation(m, "Sedimentation");
  sedimentation
      .def(py::init<double, double, double>(), py::arg("c0") = 1.0, py::arg("s_exp") = 2.0,
           py::arg("phi_star") = 0.64)
      .def_readwrite("c0", &cg::Sedimentation::c0)
      .def_readwrite("s_exp", &cg::Sedimentation::s_exp)
      .def_readwrite("phi_star", &cg::Sedimentation::phi_star);
  def_law_evaluators(sedimentation);

  py::class_<cg::RunConfig>(m, "RunConfig")
      .def_readonly("scenario", &cg::RunConfig::scenario)
      .def_readonly("seed", &cg::RunConfig::seed)
      .def_property_readonly("t_end", [](const cg::RunConfig& c) { return c.solver.t_end; })
      .def_property_readonly("output_dir", [](const cg::RunConfig& c) { return c.output.dir; })
      .def_property_readonly("law",
                             [](const cg::RunConfig& c) {
                               return std::visit([](const auto& l) { return py::cast(l); },
                                                 c.setup.law);
                             })
      .def("to_text", [](const cg::RunConfig& c) { return cg::serialize_config(c); })
      .def("__eq__", [](const cg::RunConfig& a, const cg::RunConfig& b) { return a == b; })
      .def("__repr__", [](const cg::RunConfig& c) {
        return "<RunConfig scenario=" + c.scenario + " t_end=" + std::to_string(c.solver.t_end) + ">";
      });

  m.def("scenario_names", &cg::scenario_names);
  m.def("parse_config", &cg::parse_config, py::arg("text"),
        py::arg("overrides") = std::vector<std::string>{});
  m.def("load_config", &cg::load_config, py::arg("path"),
        py::arg("overrides") = std::vector<std::string>{});

  m.def(
      "check",
      [](const cg::RunConfig& cfg) {
        const cg::CheckReport rep = cg::check_config(cfg);
        py::list violations;
        for (const auto& v : rep.initial.violations) violations.append(v.message);
        return py::dict(py::arg("ok") = rep.ok, py::arg("warnings") = rep.warnings,
                        py::arg("error") = rep.error,
                        py::arg("mean_density") = rep.initial.mean_density,
                        py::arg("barrier_inf") = rep.initial.barrier_inf,
                        py::arg("violations") = violations);
      },
      py::arg("config"));

  m.def(
      "run",
      [](const cg::RunConfig& cfg, bool write_files) {
        cg::RunOptions opts;
        opts.write_files = write_files;
        cg::RunResult r;
        {
          py::gil_scoped_release release;
          r = cg::run_once(cfg, opts);
        }
        return run_result_to_dict(r);
      },
      py::arg("config"), py::arg("write_files") = true);

  m.def(
      "sweep",
      [](const cg::RunConfig& cfg) {
        cg::SweepResult s;
        {
          py::gil_scoped_release release;
          s = cg::run_sweep(cfg);
        }
        py::list rows;
        for (const auto& r : s.rows) {
          py::dict d;
          d["label"] = r.label;
          d["eps"] = r.eps;
          d["kappa"] = r.kappa;
          d["delta"] = r.delta;
          d["ok"] = r.ok;
          d["error"] = r.error;
          d["final_max_ratio"] = r.final_max_ratio;
          d["complementarity_integral"] = r.complementarity_integral;
          d["pi_integral"] = r.pi_integral;
          d["lmp_mean"] = r.lmp_mean;
          d["congested_snapshots"] = r.congested_snapshots;
          d["max_pi"] = r.max_pi;
          d["mass_drift"] = r.mass_drift;
          d["budget_relative"] = r.budget_relative;
          rows.append(d);
        }
        py::dict checks;
        for (const auto& c : s.checks)
          checks[py::str(c.name)] = py::dict(py::arg("applicable") = c.applicable,
                                             py::arg("holds") = c.holds, py::arg("detail") = c.detail);
        return py::dict(py::arg("rows") = rows, py::arg("checks") = checks);
      },
      py::arg("config"));
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stwave/harness.hpp"
#include "stwave/problem.hpp"

namespace py = pybind11;
using namespace stwave;

namespace {

py::dict report_to_dict(const ErrorReport& r) {
  py::dict d;
  d["linf_l2_u"] = r.err_linf_l2_u;
  d["l2_l2_ut"] = r.err_l2_l2_ut;
  d["bestapprox_linf_l2_u"] = r.ba_linf_l2_u;
  d["bestapprox_l2_l2_ut"] = r.ba_l2_l2_ut;
  d["t0_l2"] = r.err_t0_l2;
  d["norm_stab_primal"] = r.norm_stab_primal;
  d["norm_time_jump"] = r.norm_time_jump;
  d["norm_data"] = r.norm_data;
  d["norm_dual"] = r.norm_dual;
  if (r.strong_norm_extra >= 0.0) d["strong_norm_extra"] = r.strong_norm_extra;
  if (r.probe_time >= 0.0) {
    d["probe_time"] = r.probe_time;
    d["probe_l2_rel"] = r.probe_l2_rel;
  }
  d["solver_residual"] = r.solver_residual;
  d["refinement_steps"] = r.refinement_steps;
  d["n_dofs"] = r.n_dofs;
  d["n_slabs"] = r.n_slabs;
  d["h"] = r.h;
  d["dt"] = r.dt;
  return d;
}

py::list sweep_to_list(const SweepResult& sweep) {
  py::list rows;
  for (const auto& r : sweep.rows) {
    py::dict d;
    d["L"] = r.level;
    d["order"] = r.order;
    d["contrast"] = r.contrast;
    d["linf_l2_u"] = r.err_linf_u;
    d["l2_l2_ut"] = r.err_l2_ut;
    d["bestapprox_linf_l2_u"] = r.ba_linf_u;
    d["bestapprox_l2_l2_ut"] = r.ba_l2_ut;
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Space-time FEM solver for wave-equation data assimilation with "
            "piecewise-constant wave speed";

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("dimension", &RunConfig::dimension)
      .def_readwrite("solution", &RunConfig::solution)
      .def_readwrite("c1", &RunConfig::c1)
      .def_readwrite("c2", &RunConfig::c2)
      .def_readwrite("p1", &RunConfig::p1)
      .def_readwrite("njump", &RunConfig::njump)
      .def_readwrite("final_time", &RunConfig::final_time)
      .def_readwrite("level", &RunConfig::level)
      .def_readwrite("k", &RunConfig::k)
      .def_readwrite("q", &RunConfig::q)
      .def_readwrite("kstar", &RunConfig::kstar)
      .def_readwrite("qstar", &RunConfig::qstar)
      .def_readwrite("dt_scale", &RunConfig::dt_scale)
      .def_readwrite("n_slabs", &RunConfig::n_slabs)
      .def_readwrite("omega", &RunConfig::omega)
      .def_readwrite("region", &RunConfig::region)
      .def_readwrite("boundary_data", &RunConfig::boundary_data)
      .def_readwrite("probe_time", &RunConfig::probe_time)
      .def_readwrite("strong_norm", &RunConfig::strong_norm)
      .def_readwrite("output", &RunConfig::output)
      .def_readwrite("w_cip", &RunConfig::w_cip)
      .def_readwrite("w_gls", &RunConfig::w_gls)
      .def_readwrite("w_compat", &RunConfig::w_compat)
      .def_readwrite("w_bdry", &RunConfig::w_bdry)
      .def_readwrite("w_jump", &RunConfig::w_jump)
      .def_readwrite("w_dual", &RunConfig::w_dual)
      .def("__repr__",
           [](const RunConfig& cfg) { return "<RunConfig\n" + format_config(cfg) + ">"; });

  m.def("run_single", [](const RunConfig& cfg) { return report_to_dict(run_single(cfg)); },
        py::arg("config"), "Solve one configuration and return the error report");

  m.def(
      "sweep_levels",
      [](const RunConfig& cfg, const std::vector<int>& levels,
         const std::vector<int>& orders) {
        return sweep_to_list(run_refinement_sweep(cfg, levels,
                                                  orders.empty()
                                                      ? std::vector<int>{cfg.k}
                                                      : orders));
      },
      py::arg("config"), py::arg("levels"), py::arg("orders") = std::vector<int>{},
      "Refinement sweep; returns one row per (order, level)");

  m.def(
      "sweep_contrast",
      [](const RunConfig& cfg, const std::vector<double>& contrasts, bool adapt_T) {
        return sweep_to_list(run_contrast_sweep(cfg, contrasts, adapt_T));
      },
      py::arg("config"), py::arg("contrasts"), py::arg("adapt_final_time") = false,
      "Contrast sweep at fixed level and degree");

  m.def("gcc_threshold", &gcc_threshold_for, py::arg("config"),
        "Minimal observability time of the configured data domain (1D)");

  m.def(
      "exact_value",
      [](const RunConfig& cfg, double x, double y, double t) {
        return make_solution(cfg)->value(x, y, t);
      },
      py::arg("config"), py::arg("x"), py::arg("y"), py::arg("t"),
      "Reference solution value of the configured problem");
  m.def(
      "exact_dt",
      [](const RunConfig& cfg, double x, double y, double t) {
        return make_solution(cfg)->dt(x, y, t);
      },
      py::arg("config"), py::arg("x"), py::arg("y"), py::arg("t"));

  m.def("write_csv",
        [](const std::string& path, const py::list& rows) {
          SweepResult sweep;
          for (const auto& item : rows) {
            const py::dict d = item.cast<py::dict>();
            sweep.rows.push_back({d["L"].cast<int>(), d["order"].cast<int>(),
                                  d["contrast"].cast<double>(),
                                  d["linf_l2_u"].cast<double>(),
                                  d["l2_l2_ut"].cast<double>(),
                                  d["bestapprox_linf_l2_u"].cast<double>(),
                                  d["bestapprox_l2_l2_ut"].cast<double>()});
          }
          write_csv(path, sweep);
        },
        py::arg("path"), py::arg("rows"));

  m.def("observed_order", &observed_order, py::arg("err_coarse"), py::arg("err_fine"));

  m.attr("__version__") = "0.1.0";
}

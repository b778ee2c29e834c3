#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>

#include "ssgap/backlund.hpp"
#include "ssgap/classical.hpp"
#include "ssgap/errors.hpp"
#include "ssgap/kernels.hpp"
#include "ssgap/sigma_ode.hpp"
#include "ssgap/verify.hpp"

namespace py = pybind11;
using namespace ssgap;

namespace {

verify::RunConfig make_config(int quad_order, double ode_rel_tol, double series_start, int eps) {
  verify::RunConfig cfg;
  cfg.quad_order = quad_order;
  cfg.ode_rel_tol = ode_rel_tol;
  cfg.series_start = series_start;
  cfg.eps_sign = eps;
  cfg.validate();
  return cfg;
}

py::dict to_dict(const kernels::GapResult& r) {
  py::dict d;
  d["method"] = kernels::to_string(r.method);
  d["a"] = r.a;
  d["x"] = r.x;
  d["E"] = r.E;
  d["logE"] = r.logE;
  d["err_est"] = r.err_est;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectrum-singularity gap probabilities";

  py::register_exception<RouteValidityError>(m, "RouteValidityError", PyExc_ValueError);

  m.def(
      "gap",
      [](double a, double x, const std::string& method, int quad_order, double ode_rel_tol, double series_start,
         int eps) {
        const auto cfg = make_config(quad_order, ode_rel_tol, series_start, eps);
        return to_dict(verify::run_gap(verify::parse_method(method), a, x, cfg));
      },
      py::arg("a"), py::arg("x"), py::arg("method") = "fredholm", py::arg("quad_order") = 60,
      py::arg("ode_rel_tol") = 1e-12, py::arg("series_start") = sigma::kMaxStart, py::arg("eps") = 1);

  m.def("kernel", [](double a, double u, double v) {
    return kernels::eval_kernel(kernels::KernelSpec::spectrum_singularity(a), u, v);
  });
  m.def("hard_edge_gap", [](double a, double X) { return sigma::gap_hard_edge(a, X).E; }, py::arg("a"),
        py::arg("X"));

  m.def("tau_diag", &classical::tau_diag, py::arg("n"), py::arg("X"));
  m.def("tau_cross", &classical::tau_cross, py::arg("n"), py::arg("X"));
  m.def("tau_cross_negated", &classical::tau_cross_negated, py::arg("n"), py::arg("X"));

  m.def(
      "backlund_apply",
      [](const std::string& kind, std::array<double, 5> state, bool t_means_s) {
        backlund::TransformId id;
        bool found = false;
        for (auto k : backlund::kAllKinds) {
          if (backlund::to_string(k) == kind) {
            id.kind = k;
            found = true;
          }
        }
        if (!found) throw DomainError("unknown transform '" + kind + "'");
        id.time_symbol = t_means_s ? backlund::TimeSymbol::t_means_s : backlund::TimeSymbol::t_means_sqrt_s;
        const auto x = backlund::ExtendedState::make(state[0], state[1], state[2], state[3], state[4]);
        const auto y = backlund::apply(id, x);
        return py::make_tuple(y.v1, y.v2, y.q, y.p, y.s, y.sH);
      },
      py::arg("kind"), py::arg("state"), py::arg("t_means_s") = true,
      "state = (v1, v2, q, p, s); returns (v1, v2, q, p, s, sH) of the image.");

  m.def(
      "verify_json",
      [](const std::string& suite, std::size_t trials, std::uint64_t seed) {
        verify::RunConfig cfg;
        cfg.seed = seed;
        py::gil_scoped_release release;
        const auto rep = verify::run_suite(suite, cfg, trials, seed);
        return verify::to_json(rep, cfg, seed).dump();
      },
      py::arg("suite") = "all", py::arg("trials") = 0, py::arg("seed") = 0);
}

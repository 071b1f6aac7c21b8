#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curvkit/catalog.hpp"
#include "curvkit/curvature.hpp"
#include "curvkit/error.hpp"
#include "curvkit/geodesy.hpp"
#include "curvkit/globalint.hpp"
#include "curvkit/kleinian.hpp"
#include "curvkit/quadrature.hpp"
#include "curvkit/report.hpp"
#include "curvkit/suites.hpp"

namespace py = pybind11;
using namespace curvkit;

namespace {

py::dict curvature(const std::string& metric, const std::vector<double>& x) {
  const CurvaturePoint c = curvature_at(named_metric(metric), x);
  py::dict d;
  d["metric"] = c.metric;
  d["ricci"] = c.ricci;
  d["scalar"] = c.scalar;
  d["rm_norm2"] = c.rm_norm2;
  d["ric_norm2"] = c.ric_norm2;
  d["ring_norm2"] = c.ring_norm2;
  d["weyl_norm2"] = c.weyl_norm2;
  return d;
}

py::dict gbc4_atlas(const std::string& atlas, int nodes) {
  const Gbc4Breakdown b = gbc4(named_atlas(atlas, nodes));
  py::dict d;
  d["scal2_term"] = b.scal2_term;
  d["ricci_term"] = b.ricci_term;
  d["weyl_term"] = b.weyl_term;
  d["total"] = b.total;
  d["chi_estimate"] = b.chi_estimate;
  d["volume"] = b.volume;
  return d;
}

py::dict gray(const std::string& metric, const std::vector<double>& x) {
  const GrayCoefficients g = gray_coefficients(named_metric(metric), x);
  py::dict d;
  d["c2"] = g.c2;
  d["c4"] = g.c4;
  d["laplacian_scalar"] = g.laplacian_scalar;
  return d;
}

py::dict schottky_exponent(double length, int max_length) {
  GroupSpec s;
  s.generators = {make_boost(3, 0, length), make_boost(3, 1, length)};
  s.max_length = max_length;
  const OrbitSample orbit = orbit_enumerate(s);
  py::dict d;
  for (const auto& [name, method] : {std::pair{"growth_fit", ExponentMethod::growth_fit},
                                     std::pair{"series_knee", ExponentMethod::series_knee}}) {
    const ExponentEstimate e = critical_exponent_estimate(orbit, method);
    d[name] = py::make_tuple(e.value, e.uncertainty);
  }
  d["orbit_points"] = orbit.size();
  return d;
}

std::string verify(const std::string& suite, bool fast, const std::vector<std::string>& checks) {
  SuiteConfig c;
  c.checks = checks;
  if (fast) {
    c = fast_variant(c);
    c.fast = true;
  }
  VerificationReport r;
  {
    py::gil_scoped_release release;
    r = run_suites(suite, c);
  }
  return report_json(r);
}

}  // namespace

PYBIND11_MODULE(_curvkit, m) {
  m.doc() = "Curvature, conformal geometry and Kleinian group checks";
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("catalog_names", [] {
    std::vector<std::string> names;
    for (const auto& e : catalog()) names.push_back(e.chart.name());
    return names;
  });
  m.def("curvature", &curvature, py::arg("metric"), py::arg("x"));
  m.def("gbc4", &gbc4_atlas, py::arg("atlas"), py::arg("nodes") = 0);
  m.def("atlas_volume", [](const std::string& atlas, int nodes) { return volume(named_atlas(atlas, nodes)); },
        py::arg("atlas"), py::arg("nodes") = 0);
  m.def("ball_volume",
        [](const std::string& metric, const std::vector<double>& x, double r) {
          const VolumeEstimate v = ball_volume(named_metric(metric), x, r);
          return py::make_tuple(v.value, v.error);
        },
        py::arg("metric"), py::arg("x"), py::arg("r"));
  m.def("gray_coefficients", &gray, py::arg("metric"), py::arg("x"));
  m.def("gray_expansion",
        [](const std::string& metric, const std::vector<double>& x, double r) {
          return gray_expansion(named_metric(metric), x, r);
        },
        py::arg("metric"), py::arg("x"), py::arg("r"));
  m.def("schottky_exponent", &schottky_exponent, py::arg("length"), py::arg("max_length"));
  m.def("suite_names", &suite_names);
  m.def("check_groups", &check_groups, py::arg("suite"));
  m.def("verify_json", &verify, py::arg("suite"), py::arg("fast") = false,
        py::arg("checks") = std::vector<std::string>{});
  m.attr("__version__") = kVersion;
}

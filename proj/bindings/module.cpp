#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mkdvlab/field.hpp"
#include "mkdvlab/flow.hpp"
#include "mkdvlab/hierarchy.hpp"
#include "mkdvlab/measures.hpp"
#include "mkdvlab/pairing.hpp"
#include "mkdvlab/runner.hpp"

namespace py = pybind11;
using namespace mkdv;

namespace {

SpectralField field_from_coeffs(int K, const std::vector<cplx>& coeffs) {
  return SpectralField(K, coeffs);
}

std::vector<cplx> field_coeffs(const SpectralField& u) {
  return {u.coeffs().begin(), u.coeffs().end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "pseudo-spectral laboratory for the periodic complex mKdV";
  m.attr("__version__") = MKDV_VERSION;

  py::class_<SpectralField>(m, "SpectralField")
      .def(py::init(&field_from_coeffs), py::arg("K"), py::arg("coeffs"))
      .def_property_readonly("K", &SpectralField::cutoff)
      .def("coeffs", &field_coeffs, "coefficients for k = -K..K")
      .def("__getitem__",
           [](const SpectralField& u, int k) { return u.at_or_zero(k); });

  m.def("project_low", &project_low, py::arg("u"), py::arg("N"));
  m.def("project_high", &project_high, py::arg("u"), py::arg("N"));
  m.def("derivative", &derivative, py::arg("u"), py::arg("order") = 1);
  m.def("sobolev_norm", &sobolev_norm, py::arg("u"), py::arg("s"));
  m.def("l2_norm", &l2_norm);
  m.def("integrate", [](const SpectralField& u) { return integrate(u); });
  m.def("w1inf_norm", &w1inf_norm);

  m.def("energy", &energy, py::arg("u"), py::arg("n"));
  m.def("energy_explicit", &energy_explicit, py::arg("u"), py::arg("n"));
  m.def(
      "remainder",
      [](const SpectralField& u, int n) { return mkdv::remainder(u, n); },
      py::arg("u"), py::arg("n"));

  py::class_<FlowParams>(m, "FlowParams")
      .def(py::init<>())
      .def_readwrite("N", &FlowParams::N)
      .def_readwrite("K", &FlowParams::K)
      .def_readwrite("dt", &FlowParams::dt);
  m.def("evolve", &evolve, py::arg("u0"), py::arg("t"), py::arg("params"));
  m.def("linear_propagator", &linear_propagator, py::arg("u0"), py::arg("t"));
  m.def(
      "e_star",
      [](const SpectralField& u, int j, int N, const std::string& method) {
        return e_star(u, j, N,
                      method == "analytic" ? EStarMethod::analytic
                                           : EStarMethod::finite_difference);
      },
      py::arg("u"), py::arg("j"), py::arg("N"), py::arg("method") = "analytic");

  py::class_<GaussianSamplerSpec>(m, "GaussianSamplerSpec")
      .def(py::init([](int n, int K, std::uint64_t seed, std::uint64_t stream) {
             return GaussianSamplerSpec{n, K, seed, stream};
           }),
           py::arg("n"), py::arg("K"), py::arg("seed"), py::arg("stream_id") = 0)
      .def_readwrite("n", &GaussianSamplerSpec::n)
      .def_readwrite("K", &GaussianSamplerSpec::K)
      .def_readwrite("seed", &GaussianSamplerSpec::seed)
      .def_readwrite("stream_id", &GaussianSamplerSpec::stream_id);
  m.def("sample_mu", &sample_mu);
  m.def("weighted_density", &weighted_density, py::arg("u"), py::arg("n"),
        py::arg("R"), py::arg("N"));
  m.def("chi", &chi);
  m.def("chi_prime", &chi_prime);

  m.def(
      "pathwise_sum",
      [](int N, const std::string& family, const std::string& kind,
         const std::vector<cplx>& g) {
        FamilyTag f;
        if (family == "I0") f = FamilyTag::I0;
        else if (family == "TildeI26") f = FamilyTag::TildeI26;
        else if (family == "HatI26") f = FamilyTag::HatI26;
        else if (family == "TildeI36") f = FamilyTag::TildeI36;
        else if (family == "HatI36") f = FamilyTag::HatI36;
        else if (family == "I15") f = FamilyTag::I15;
        else if (family == "I24") f = FamilyTag::I24;
        else if (family == "I34") f = FamilyTag::I34;
        else if (family == "I26") f = FamilyTag::I26;
        else if (family == "I36") f = FamilyTag::I36;
        else throw std::invalid_argument("unknown family " + family);
        Coefficient c{kind == "A"   ? CoefficientKind::A
                      : kind == "B" ? CoefficientKind::B
                                    : CoefficientKind::C,
                      2};
        return pathwise_sum(N, f, c, g);
      },
      py::arg("N"), py::arg("family"), py::arg("kind"), py::arg("g"));

  m.def("version", &version_string);
}

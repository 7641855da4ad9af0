#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bipdo/analysis.hpp"
#include "bipdo/runner.hpp"
#include "bipdo/selftest.hpp"

namespace py = pybind11;
using namespace bipdo;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> shape_of(const GridSpec& g) { return std::vector<py::ssize_t>(g.n(), g.N); }

SampledField to_field(const GridSpec& g, const CArray& a) {
  if (a.ndim() != g.n()) throw std::invalid_argument("array must have one axis per grid dimension");
  for (int d = 0; d < g.n(); ++d)
    if (a.shape(d) != g.N) throw std::invalid_argument("array shape does not match the grid");
  return SampledField(g, std::vector<cplx>(a.data(), a.data() + a.size()));
}

CArray to_array(const SampledField& f) {
  CArray out(shape_of(f.grid));
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_bipdo, m) {
  m.doc() = "Bi-parameter pseudo-differential operators on a discretized torus";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<MollifierInfeasible>(m, "MollifierInfeasible", PyExc_RuntimeError);

  py::class_<GridSpec>(m, "Grid")
      .def(py::init(&make_grid), py::arg("n1"), py::arg("n2"), py::arg("N"), py::arg("L"))
      .def_readonly("n1", &GridSpec::n1)
      .def_readonly("n2", &GridSpec::n2)
      .def_readonly("N", &GridSpec::N)
      .def_readonly("L", &GridSpec::L)
      .def_property_readonly("n", &GridSpec::n)
      .def("__repr__", [](const GridSpec& g) {
        return "Grid(n1=" + std::to_string(g.n1) + ", n2=" + std::to_string(g.n2) + ", N=" + std::to_string(g.N) +
               ", L=" + std::to_string(g.L) + ")";
      });

  py::class_<SymbolDescriptor>(m, "Symbol")
      .def_readonly("name", &SymbolDescriptor::name)
      .def_readonly("rho", &SymbolDescriptor::rho)
      .def_readonly("delta", &SymbolDescriptor::delta)
      .def_property_readonly("separable", &SymbolDescriptor::separable)
      .def("__call__", [](const SymbolDescriptor& s, std::vector<double> x, std::vector<double> xi) {
        if (static_cast<int>(x.size()) != s.split.n() || static_cast<int>(xi.size()) != s.split.n())
          throw std::invalid_argument("x and xi need one entry per axis");
        return s(x, xi);
      });

  m.def(
      "builtin",
      [](const std::string& name, const Params& params, int n1, int n2) {
        return builtin(name, params, Split{n1, n2});
      },
      py::arg("name"), py::arg("params") = Params{}, py::arg("n1") = 1, py::arg("n2") = 1);
  m.def("builtin_names", [] {
    std::vector<std::string> names;
    for (const auto& info : builtin_catalog()) names.push_back(info.name);
    return names;
  });

  m.def(
      "derived",
      [](const SymbolDescriptor& s, const std::string& kind, std::vector<int> j, int ell, double r, int ell_max) {
        DecompositionIndex idx{std::move(j), ell, r, ell_max};
        return derived_symbol(s, derived_kind_from_string(kind), idx);
      },
      py::arg("symbol"), py::arg("kind"), py::arg("j") = std::vector<int>{}, py::arg("ell") = 0, py::arg("r") = 1.0,
      py::arg("ell_max") = 0);

  m.def(
      "apply",
      [](const SymbolDescriptor& s, const GridSpec& g, const CArray& f) {
        QuantizedOperator T(s, g);
        SampledField in = to_field(g, f);
        py::gil_scoped_release release;
        SampledField out = T.apply(in);
        py::gil_scoped_acquire acquire;
        return to_array(out);
      },
      py::arg("symbol"), py::arg("grid"), py::arg("f"));
  m.def(
      "adjoint_apply",
      [](const SymbolDescriptor& s, const GridSpec& g, const CArray& f) {
        return to_array(QuantizedOperator(s, g).adjoint_apply(to_field(g, f)));
      },
      py::arg("symbol"), py::arg("grid"), py::arg("f"));
  m.def(
      "dense_matrix",
      [](const SymbolDescriptor& s, const GridSpec& g) {
        auto mat = QuantizedOperator(s, g).dense_matrix();
        auto n = static_cast<py::ssize_t>(g.size());
        py::array_t<cplx> out({n, n});
        std::copy(mat.begin(), mat.end(), out.mutable_data());
        return out;
      },
      py::arg("symbol"), py::arg("grid"));

  m.def("dft_forward", [](const GridSpec& g, const CArray& f) { return to_array(dft_forward(to_field(g, f))); });
  m.def("dft_inverse", [](const GridSpec& g, const CArray& f) { return to_array(dft_inverse(to_field(g, f))); });
  m.def("lp_norm", [](const GridSpec& g, const CArray& f, double p) { return lp_norm(to_field(g, f), p); });
  m.def("bmo_norm", [](const GridSpec& g, const CArray& f) { return bmo_norm(to_field(g, f)); });

  m.def(
      "l2_opnorm",
      [](const SymbolDescriptor& s, const GridSpec& g, double tol, int max_iter) {
        PowerOptions o;
        o.tol = tol;
        o.max_iter = max_iter;
        OpNormResult r;
        {
          py::gil_scoped_release release;
          r = l2_opnorm(QuantizedOperator(s, g), o);
        }
        return py::make_tuple(r.value, r.iterations, r.converged);
      },
      py::arg("symbol"), py::arg("grid"), py::arg("tol") = 1e-10, py::arg("max_iter") = 500,
      "Returns (norm, iterations, converged).");

  m.def("kernel_l1", [](const SymbolDescriptor& s, const GridSpec& g, std::vector<double> x) {
    return kernel_l1(s, g, x);
  });

  m.def(
      "commutator_error",
      [](const SymbolDescriptor& s, const GridSpec& g, std::vector<int> anchor, int side, double rho,
         std::uint64_t seed) { return commutator_check(s, g, DyadicCube{std::move(anchor), side}, rho, seed).max_rel_error; },
      py::arg("symbol"), py::arg("grid"), py::arg("anchor"), py::arg("side"), py::arg("rho"),
      py::arg("seed") = kDefaultSeed);

  m.def(
      "identity_suite",
      [](int N) {
        py::dict d;
        for (const auto& c : identity_suite(N)) d[py::str(c.name)] = py::make_tuple(c.error, c.pass);
        return d;
      },
      py::arg("N") = 32);

  m.def("parse_config", [](const std::string& text) { return to_text(parse_config(text)); },
        "Validates a config and returns its canonical text.");
  m.def("build_id", &build_id);
}

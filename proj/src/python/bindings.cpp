#include <optional>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qgraph/cli.hpp"
#include "qgraph/json_io.hpp"

namespace py = pybind11;
using namespace qgraph;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

CouplingVector couplings(const MarkedGraph& g, const py::dict& d) {
  std::map<std::string, Rational> values;
  for (const auto& [k, v] : d) values.emplace(py::str(k).cast<std::string>(), parse_rational(py::str(v).cast<std::string>()));
  return CouplingVector(g, values, true);
}

std::optional<CouplingVector> maybe(const MarkedGraph& g, const std::optional<py::dict>& d) {
  if (!d) return std::nullopt;
  return couplings(g, *d);
}

QuasiDirection direction(const std::string& s) {
  if (s == "i" || s == "delta'->delta") return QuasiDirection::DeltaPrimeToDelta;
  if (s == "ii" || s == "delta->delta'") return QuasiDirection::DeltaToDeltaPrime;
  throw Error(ErrorCode::InvalidArgument, "direction must be 'i' or 'ii'");
}

py::object reduction(const ReductionResult& r, const MarkedGraph& g, const std::optional<py::dict>& a,
                     const std::optional<py::dict>& b) {
  const auto ca = maybe(g, a);
  const auto cb = maybe(g, b);
  return to_py(reduction_json(r, ca ? &*ca : nullptr, cb ? &*cb : nullptr));
}

}  // namespace

PYBIND11_MODULE(_qgraph, m) {
  m.doc() = "Quantum graphs with delta and delta' vertex conditions: secular expansion, spectra and isospectrality.";

  // args are (code, message); the class object is owned by the module for the process lifetime
  static PyObject* error_type = PyErr_NewException("qgraph._qgraph.QGraphError", PyExc_ValueError, nullptr);
  m.attr("QGraphError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const auto j = error_json(e);
      const auto args = py::make_tuple(j["error"].get<std::string>(), j["message"].get<std::string>());
      PyErr_SetObject(error_type, args.ptr());
    }
  });

  py::class_<MarkedGraph>(m, "Graph")
      .def(py::init([](const std::string& text) { return parse_graph(text); }), py::arg("text"))
      .def_static("from_file", [](const std::string& path) {
        const auto text = py::module_::import("pathlib").attr("Path")(path).attr("read_text")().cast<std::string>();
        return parse_graph(text);
      })
      .def("serialize", &serialize_graph)
      .def_property_readonly("vertex_ids", [](const MarkedGraph& g) {
        std::vector<std::string> out;
        for (const auto& v : g.vertices()) out.push_back(v.id);
        return out;
      })
      .def_property_readonly("vertex_types", [](const MarkedGraph& g) {
        std::vector<std::string> out;
        for (const auto& v : g.vertices()) out.emplace_back(to_string(v.type));
        return out;
      })
      .def_property_readonly("edges", [](const MarkedGraph& g) {
        std::vector<py::tuple> out;
        for (const auto& e : g.edges()) out.push_back(py::make_tuple(e.id, g.vertex(e.u).id, g.vertex(e.v).id, e.length));
        return out;
      })
      .def("degree", [](const MarkedGraph& g, const std::string& v) { return degree(g, v); })
      .def("is_tree", &MarkedGraph::is_tree)
      .def("total_length", &MarkedGraph::total_length)
      .def("__repr__", [](const MarkedGraph& g) {
        std::ostringstream s;
        s << "<Graph " << g.vertex_count() << " vertices, " << g.edge_count() << " edges>";
        return s.str();
      });

  m.def("secular_value", [](const MarkedGraph& g, const py::dict& a, double lambda) {
    return secular_value(g, couplings(g, a), lambda);
  }, py::arg("graph"), py::arg("alpha"), py::arg("lam"));

  m.def("eigenvalues", [](const MarkedGraph& g, const py::dict& a, double lmin, double lmax, const std::string& method,
                          unsigned threads) {
    const auto c = couplings(g, a);
    SpectrumOptions opts;
    opts.threads = threads;
    SpectrumWindow w;
    {
      py::gil_scoped_release nogil;
      w = method == "edge-basis" ? eigenvalues_edge_basis(g, c, lmin, lmax, opts)
                                 : eigenvalues_secular(g, c, lmin, lmax, opts);
    }
    return to_py(spectrum_json(w));
  }, py::arg("graph"), py::arg("alpha"), py::arg("lmin"), py::arg("lmax"), py::arg("method") = "secular",
     py::arg("threads") = 1);

  m.def("expand", [](const MarkedGraph& g, const std::string& method) {
    return to_py(expansion_json(method == "permutation" ? expand_permutation(g) : expand_subgraphs(g)));
  }, py::arg("graph"), py::arg("method") = "subgraphs");

  m.def("check_isospectral", [](const MarkedGraph& g, const py::dict& a, const py::dict& b, bool relaxed) {
    const auto x = couplings(g, a);
    const auto y = couplings(g, b);
    return to_py(verdict_json(relaxed ? check_isospectral_relaxed(g, x, y) : check_isospectral(g, x, y)));
  }, py::arg("graph"), py::arg("alpha"), py::arg("alpha2"), py::arg("relaxed") = false);

  m.def("sigma", [](const MarkedGraph& g, const py::dict& a, const py::dict& b) {
    return to_py(sigma_json(g, couplings(g, a), couplings(g, b)));
  }, py::arg("graph"), py::arg("alpha"), py::arg("alpha2"));

  m.def("balance", [](const MarkedGraph& g, const std::string& v, const py::dict& a, const py::dict& b) {
    return to_py(balance_json(v, balancing_residual(g, v, couplings(g, a), couplings(g, b))));
  }, py::arg("graph"), py::arg("vertex"), py::arg("alpha"), py::arg("alpha2"));

  m.def("trim_edge", [](const MarkedGraph& g, const std::string& e, std::optional<py::dict> a,
                        std::optional<py::dict> b) { return reduction(trim_same_type_edge(g, e), g, a, b); },
        py::arg("graph"), py::arg("edge"), py::arg("alpha") = py::none(), py::arg("alpha2") = py::none());

  m.def("trim_loop_vertex", [](const MarkedGraph& g, const std::string& v, std::optional<py::dict> a,
                               std::optional<py::dict> b) { return reduction(trim_loop_vertex(g, v), g, a, b); },
        py::arg("graph"), py::arg("vertex"), py::arg("alpha") = py::none(), py::arg("alpha2") = py::none());

  m.def("clean_vertex", [](const MarkedGraph& g, const std::string& v, std::optional<py::dict> a,
                           std::optional<py::dict> b) { return reduction(clean_vertex(g, v), g, a, b); },
        py::arg("graph"), py::arg("vertex"), py::arg("alpha") = py::none(), py::arg("alpha2") = py::none());

  m.def("quasi_remove", [](const MarkedGraph& g, const std::string& e, const std::string& dir) {
    return to_py(quasigraph_json(quasi_remove_mixed_edge(g, e, direction(dir))));
  }, py::arg("graph"), py::arg("edge"), py::arg("direction") = "i");

  m.def("thm00_reduce", [](const MarkedGraph& g, const std::string& e, const py::dict& a, const py::dict& b,
                           std::optional<std::string> dir) {
    std::optional<QuasiDirection> d;
    if (dir) d = direction(*dir);
    const auto r = thm00_reduce(g, e, couplings(g, a), couplings(g, b), d);
    Json j = reduction_json(r.reduction);
    j["alpha"] = to_json(r.alpha);
    j["alpha2"] = to_json(r.alpha2);
    j["quasigraph"] = quasigraph_json(r.quasigraph);
    return to_py(j);
  }, py::arg("graph"), py::arg("edge"), py::arg("alpha"), py::arg("alpha2"), py::arg("direction") = py::none());

  m.def("uniqueness_report", [](const MarkedGraph& g) { return to_py(report_json(uniqueness_report(g))); },
        py::arg("graph"));

  m.def("find_isospectral", [](const MarkedGraph& g, const py::dict& a, std::size_t starts, std::uint64_t seed,
                               unsigned threads) {
    const auto c = couplings(g, a);
    SearchConfig cfg;
    cfg.starts = starts;
    cfg.seed = seed;
    cfg.threads = threads;
    std::vector<IsoCandidate> found;
    {
      py::gil_scoped_release nogil;
      found = find_isospectral_numeric(g, c, cfg);
    }
    return to_py(search_json(found));
  }, py::arg("graph"), py::arg("alpha"), py::arg("starts") = 48, py::arg("seed") = 1, py::arg("threads") = 1);

  m.def("a3_family", [](const std::string& a, const std::string& variant) {
    const auto v = variant == "pdp" ? A3Variant::DeltaPrimeDeltaDeltaPrime : A3Variant::DeltaDeltaPrimeDelta;
    const auto [x, y] = a3_family(parse_rational(a), v);
    return py::make_tuple(a3_graph(v), to_py(to_json(x)), to_py(to_json(y)));
  }, py::arg("a"), py::arg("variant") = "dpd");

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));

#ifdef QGRAPH_VERSION
  m.attr("__version__") = QGRAPH_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}

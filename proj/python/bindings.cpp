#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qgraph/errors.hpp"
#include "qgraph/green_heat.hpp"
#include "qgraph/inverse.hpp"
#include "qgraph/io.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/trace.hpp"
#include "qgraph/walks.hpp"

namespace py = pybind11;
using namespace qgraph;

namespace {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Numeric: return "numeric";
  }
  return "internal";
}

py::list edge_list(const MetricGraph& g) {
  py::list out;
  for (const auto& e : g.internal_edges())
    out.append(py::make_tuple(e.id, g.vertices()[e.from], g.vertices()[e.to], e.length));
  return out;
}

py::dict eigenvalue_dict(const Eigenvalue& e) {
  py::dict d;
  d["k"] = e.k;
  d["lambda"] = e.lambda;
  d["multiplicity"] = e.multiplicity;
  d["kernel_dim"] = e.kernel_dim;
  d["residual"] = e.residual;
  d["candidate"] = e.candidate;
  return d;
}

py::list eigenvalue_list(const std::vector<Eigenvalue>& v) {
  py::list out;
  for (const auto& e : v) out.append(eigenvalue_dict(e));
  return out;
}

py::dict series_dict(const SeriesResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["walks_used"] = r.walks_used;
  d["cutoff_length"] = r.cutoff_length;
  d["tail_bound"] = r.tail_bound;
  return d;
}

CompareSign sign_of(const std::string& s) { return compare_sign_from_string(s); }

}  // namespace

PYBIND11_MODULE(_qgraph, m) {
  m.doc() = "Spectral computations on metric graphs";

  static py::exception<Error> error(m, "QGraphError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = e.code();
      exc.attr("kind") = kind_name(e.kind());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<GraphDocument>(m, "Graph")
      .def_static("from_file", [](const std::filesystem::path& p) { return load_document_file(p); }, py::arg("path"))
      .def_static("from_json", &load_document, py::arg("text"))
      .def("to_json", [](const GraphDocument& d) { return serialize(d.graph, &d.boundary); })
      .def_property_readonly("vertices", [](const GraphDocument& d) { return d.graph.vertices(); })
      .def_property_readonly("internal_edges", [](const GraphDocument& d) { return edge_list(d.graph); },
                             "(id, from, to, length) tuples")
      .def_property_readonly("external_edges",
                             [](const GraphDocument& d) {
                               py::list out;
                               for (const auto& e : d.graph.external_edges())
                                 out.append(py::make_tuple(e.id, d.graph.vertices()[e.vertex]));
                               return out;
                             })
      .def_property_readonly("num_slots", [](const GraphDocument& d) { return d.graph.num_slots(); })
      .def_property_readonly("total_length", [](const GraphDocument& d) { return d.graph.total_length(); })
      .def_property_readonly("is_compact", [](const GraphDocument& d) { return d.graph.is_compact(); })
      .def_property_readonly("k_independent", [](const GraphDocument& d) { return d.boundary.k_independent(); })
      .def(
          "with_magnetic",
          [](const GraphDocument& d, const std::vector<double>& phases) {
            return GraphDocument{d.graph, apply_magnetic(d.graph, d.boundary, phases)};
          },
          py::arg("slot_phases"), "Copy with A → AU, B → BU at every vertex; one phase per slot.")
      .def("validate",
           [](const GraphDocument& d) {
             const auto r = validate(d.graph);
             py::dict out;
             out["connected"] = r.connected;
             out["has_tadpoles"] = r.has_tadpoles;
             out["degree_sum_ok"] = r.degree_sum_ok;
             out["gauss_bonnet_ok"] = r.gauss_bonnet_ok;
             out["degrees"] = r.degrees;
             out["total_length"] = r.total_length;
             out["euler_number"] = r.euler_number;
             return out;
           })
      .def("__repr__", [](const GraphDocument& d) {
        return "<qgraph.Graph |V|=" + std::to_string(d.graph.num_vertices()) +
               " |I|=" + std::to_string(d.graph.num_internal()) + " |E|=" + std::to_string(d.graph.num_external()) +
               ">";
      });

  m.def(
      "vertex_scattering",
      [](const Matrix& A, const Matrix& B, cplx k) {
        return vertex_scattering(build_vertex_bc(0, static_cast<std::size_t>(A.rows()), Preset::Custom,
                                                 std::make_pair(A, B)),
                                 k);
      },
      py::arg("A"), py::arg("B"), py::arg("k"));

  m.def(
      "global_scattering",
      [](const GraphDocument& d, cplx k) { return assemble_global_scattering(d.graph, d.boundary, k).S; },
      py::arg("graph"), py::arg("k"));

  m.def(
      "scattering_matrix",
      [](const GraphDocument& d, double k) { return scattering_matrix(d.graph, d.boundary, k).sigma; },
      py::arg("graph"), py::arg("k"));

  m.def(
      "eigenvalues",
      [](const GraphDocument& d, double k_max, double tol) {
        const auto r = eigenvalues(d.graph, d.boundary, k_max, tol);
        py::dict out;
        out["eigenvalues"] = eigenvalue_list(r.eigenvalues);
        out["candidates"] = eigenvalue_list(r.candidates);
        return out;
      },
      py::arg("graph"), py::arg("k_max"), py::arg("tol") = 1e-10);

  m.def(
      "spectral_shift",
      [](const GraphDocument& d, const std::vector<double>& lambdas) {
        const auto r = spectral_shift(d.graph, d.boundary, lambdas);
        py::dict out;
        out["lambda"] = r.lambda;
        out["phase"] = r.phase;
        out["counting"] = r.counting;
        out["xi"] = r.xi;
        out["det_sigma"] = r.det_sigma;
        out["unitarity_defect"] = r.unitarity_defect;
        out["birman_krein_residual"] = r.birman_krein_residual;
        out["zero_modes"] = r.zero_modes;
        return out;
      },
      py::arg("graph"), py::arg("lambdas"));

  m.def(
      "green",
      [](const GraphDocument& d, cplx k, const std::string& xe, double x, const std::string& ye, double y,
         double eps, const std::string& method) {
        const auto px = make_point(d.graph, xe, x), py_ = make_point(d.graph, ye, y);
        if (method == "closed") return cplx(green_closed(d.graph, d.boundary, k, px, py_));
        if (method != "series") throw validation_error("method must be 'series' or 'closed'");
        return green_series(d.graph, d.boundary, k, px, py_, eps).value;
      },
      py::arg("graph"), py::arg("k"), py::arg("x_edge"), py::arg("x"), py::arg("y_edge"), py::arg("y"),
      py::arg("eps") = 1e-10, py::arg("method") = "series");

  m.def(
      "heat_kernel",
      [](const GraphDocument& d, double t, const std::string& xe, double x, const std::string& ye, double y,
         double eps) {
        return series_dict(
            heat_kernel(d.graph, d.boundary, t, make_point(d.graph, xe, x), make_point(d.graph, ye, y), eps));
      },
      py::arg("graph"), py::arg("t"), py::arg("x_edge"), py::arg("x"), py::arg("y_edge"), py::arg("y"),
      py::arg("eps") = 1e-10);

  m.def(
      "compare_traces",
      [](const GraphDocument& d, const std::vector<double>& t, double eps, const std::string& compare,
         unsigned threads) {
        TraceReport r;
        {
          py::gil_scoped_release nogil;
          r = compare_traces(d.graph, d.boundary, t, eps, sign_of(compare), threads);
        }
        py::dict out;
        out["t"] = r.cycles.t;
        out["cycle_side"] = r.cycles.value;
        out["spectral_side"] = r.spectral.value;
        out["weyl"] = r.cycles.weyl;
        out["constant"] = r.cycles.constant;
        out["cycle_sum"] = r.cycles.cycle_sum;
        out["tail_bound"] = r.cycles.tail_bound;
        out["discrepancy"] = r.abs_discrepancy;
        out["cutoff_length"] = r.cycles.cutoff_length;
        out["cycles_used"] = r.cycles.cycles_used;
        out["ok"] = r.ok;
        return out;
      },
      py::arg("graph"), py::arg("t"), py::arg("eps") = 1e-10, py::arg("compare") = "neumann", py::arg("threads") = 1);

  m.def(
      "cycles",
      [](const GraphDocument& d, double lambda) {
        py::list out;
        for (const auto& c : enumerate_cycles(d.graph, d.boundary, lambda)) {
          py::dict r;
          r["length"] = c.length;
          r["weight"] = c.weight;
          r["power"] = c.power;
          r["representative"] = cycle_representative(d.graph, c);
          out.append(r);
        }
        return out;
      },
      py::arg("graph"), py::arg("lambda_"));

  m.def(
      "length_spectrum",
      [](const GraphDocument& d, double lambda) {
        py::list out;
        for (const auto& gr : reduced_length_spectrum(d.graph, d.boundary, lambda))
          out.append(py::make_tuple(gr.length, gr.amplitude, gr.cycles));
        return out;
      },
      py::arg("graph"), py::arg("lambda_"), "(length, amplitude, cycles) groups of the reduced length spectrum");

  m.def(
      "recover_lengths",
      [](const GraphDocument& d, double k_max, double omega_max, double sigma, double rel_floor) {
        const RecoveryOptions opt{omega_max, sigma, rel_floor};
        const auto spec = eigenvalues(d.graph, d.boundary, k_max, 1e-10);
        LengthRecovery rec;
        if (d.graph.is_compact()) {
          rec = recover_length_spectrum(spec, opt);
        } else {
          const ScatteringPhase phase(d.graph, d.boundary, k_max);
          rec = recover_length_spectrum(phase, zero_mode_multiplicity(d.graph, d.boundary), spec.candidates, opt);
        }
        py::dict out;
        py::list peaks;
        for (const auto& p : rec.peaks) peaks.append(py::make_tuple(p.omega, p.amplitude));
        out["peaks"] = peaks;
        out["omega"] = rec.omega;
        out["transform"] = rec.transform;
        out["sigma"] = rec.sigma;
        out["length_estimate"] = rec.length_estimate;
        return out;
      },
      py::arg("graph"), py::arg("k_max") = 400.0, py::arg("omega_max") = 10.0, py::arg("sigma") = 0.0,
      py::arg("rel_floor") = 0.05);

  m.def(
      "check_hypotheses",
      [](const GraphDocument& d) {
        const auto h = check_inverse_hypotheses(d.graph, d.boundary);
        py::dict out;
        out["relation_search_done"] = h.relation_search_done;
        out["lengths_rationally_independent"] = h.lengths_rationally_independent;
        out["relation"] = h.relation;
        out["all_s_entries_nonzero"] = h.all_s_entries_nonzero;
        out["degree_two_standard"] = h.degree_two_standard;
        out["notes"] = h.notes;
        return out;
      },
      py::arg("graph"));
}

#include "qgraph/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qgraph/errors.hpp"

namespace qgraph {

using json = nlohmann::ordered_json;

namespace {

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error(std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T field(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) throw parse_error(std::string(where) + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw parse_error(std::string(where) + ": field '" + key + "' has the wrong type");
  }
}

MetricGraph graph_from_json(const json& doc) {
  if (!doc.is_object()) throw parse_error("document must be a JSON object");
  auto vertices = field<std::vector<std::string>>(doc, "vertices", "graph");
  std::vector<InternalEdgeSpec> internal;
  std::vector<ExternalEdgeSpec> external;
  if (doc.contains("internal_edges")) {
    if (!doc["internal_edges"].is_array()) throw parse_error("internal_edges must be an array");
    for (const auto& e : doc["internal_edges"]) {
      internal.push_back({field<std::string>(e, "id", "internal edge"), field<std::string>(e, "from", "internal edge"),
                          field<std::string>(e, "to", "internal edge"), field<double>(e, "length", "internal edge")});
    }
  }
  if (doc.contains("external_edges")) {
    if (!doc["external_edges"].is_array()) throw parse_error("external_edges must be an array");
    for (const auto& e : doc["external_edges"])
      external.push_back({field<std::string>(e, "id", "external edge"), field<std::string>(e, "vertex", "external edge")});
  }
  return MetricGraph::create(std::move(vertices), internal, external);
}

cplx parse_entry(const json& x) {
  if (x.is_number()) return {x.get<double>(), 0.0};
  if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number())
    return {x[0].get<double>(), x[1].get<double>()};
  throw parse_error("matrix entry must be a number or an [re, im] pair");
}

/// Accepts a flat row-major list of n² entries or a list of n rows.
Matrix parse_matrix(const json& m, std::size_t n, const std::string& where) {
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix out(dim, dim);
  if (!m.is_array()) throw parse_error(where + " must be an array");
  if (m.size() == n * n && (n != 1 || !m[0].is_array() || m[0].size() != 1)) {
    bool flat = true;
    for (const auto& x : m) flat = flat && (x.is_number() || (x.is_array() && x.size() == 2 && x[0].is_number()));
    if (flat) {
      for (std::size_t i = 0; i < n * n; ++i) out(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = parse_entry(m[i]);
      return out;
    }
  }
  if (m.size() != n) throw parse_error(where + " must have " + std::to_string(n) + " rows");
  for (std::size_t r = 0; r < n; ++r) {
    if (!m[r].is_array() || m[r].size() != n) throw parse_error(where + " row has the wrong length");
    for (std::size_t c = 0; c < n; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_entry(m[r][c]);
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
  return out;
}

}  // namespace

MetricGraph load_graph(const std::string& text) { return graph_from_json(parse_text(text)); }

GraphDocument load_document(const std::string& text) {
  const json doc = parse_text(text);
  MetricGraph g = graph_from_json(doc);
  BoundaryData data;
  json bnd = doc.contains("boundary") ? doc["boundary"] : json::object();
  if (!bnd.is_object()) throw parse_error("boundary must be an object");
  for (const auto& [vid, _] : bnd.items()) {
    if (!g.find_vertex(vid)) throw validation_error("boundary names unknown vertex '" + vid + "'");
  }
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const auto& vid = g.vertices()[v];
    if (!bnd.contains(vid)) {
      data.vertices.push_back(build_vertex_bc(v, g.degree(v), Preset::Standard));
      continue;
    }
    const json& spec = bnd[vid];
    const auto type = field<std::string>(spec, "type", ("boundary of '" + vid + "'").c_str());
    auto preset = preset_from_string(type);
    if (!preset) throw parse_error("unknown boundary type '" + type + "' at vertex '" + vid + "'");
    std::optional<std::pair<Matrix, Matrix>> custom;
    if (*preset == Preset::Custom) {
      if (!spec.contains("A") || !spec.contains("B")) throw parse_error("custom boundary at '" + vid + "' needs A and B");
      custom = std::make_pair(parse_matrix(spec["A"], g.degree(v), "A at '" + vid + "'"),
                              parse_matrix(spec["B"], g.degree(v), "B at '" + vid + "'"));
    }
    data.vertices.push_back(build_vertex_bc(v, g.degree(v), *preset, custom));
  }
  if (doc.contains("magnetic")) {
    std::map<std::string, std::map<std::string, double>> phases;
    try {
      phases = doc["magnetic"].get<std::map<std::string, std::map<std::string, double>>>();
    } catch (const json::exception&) {
      throw parse_error("magnetic must map vertex ids to {edge id: phase}");
    }
    data = apply_magnetic(g, data, magnetic_phases_from_map(g, phases));
  }
  return {std::move(g), std::move(data)};
}

GraphDocument load_document_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_document(ss.str());
}

std::string serialize(const MetricGraph& g, const BoundaryData* boundary) {
  json doc;
  doc["vertices"] = g.vertices();
  doc["internal_edges"] = json::array();
  for (const auto& e : g.internal_edges())
    doc["internal_edges"].push_back(
        {{"id", e.id}, {"from", g.vertices()[e.from]}, {"to", g.vertices()[e.to]}, {"length", e.length}});
  doc["external_edges"] = json::array();
  for (const auto& e : g.external_edges()) doc["external_edges"].push_back({{"id", e.id}, {"vertex", g.vertices()[e.vertex]}});
  if (boundary) {
    json bnd = json::object();
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
      const auto& bc = boundary->vertices.at(v);
      json spec{{"type", to_string(bc.preset)}};
      if (bc.preset == Preset::Custom) {
        Matrix A = bc.A, B = bc.B;
        if (boundary->has_magnetic()) {
          // store the unperturbed pair; phases are written separately
          Vector u(static_cast<Eigen::Index>(g.degree(v)));
          for (std::size_t l = 0; l < g.degree(v); ++l)
            u(static_cast<Eigen::Index>(l)) = std::polar(1.0, -boundary->magnetic[g.star(v)[l]]);
          A = A * u.asDiagonal();
          B = B * u.asDiagonal();
        }
        spec["A"] = matrix_to_json(A);
        spec["B"] = matrix_to_json(B);
      }
      bnd[g.vertices()[v]] = spec;
    }
    doc["boundary"] = bnd;
    if (boundary->has_magnetic()) {
      json mag = json::object();
      for (std::size_t v = 0; v < g.num_vertices(); ++v) {
        json m = json::object();
        for (auto s : g.star(v)) m[g.edge_id(g.slot_edge(s))] = boundary->magnetic[s];
        mag[g.vertices()[v]] = m;
      }
      doc["magnetic"] = mag;
    }
  }
  return doc.dump(2);
}

}  // namespace qgraph

#include "qgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qgraph/errors.hpp"

namespace qgraph {

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

MetricGraph MetricGraph::create(std::vector<std::string> vertices, const std::vector<InternalEdgeSpec>& internal,
                                const std::vector<ExternalEdgeSpec>& external) {
  MetricGraph g;
  if (vertices.empty()) throw validation_error("graph has no vertices");
  g.vertices_ = std::move(vertices);
  for (std::size_t v = 0; v < g.vertices_.size(); ++v) {
    if (!g.vertex_index_.emplace(g.vertices_[v], v).second)
      throw validation_error("duplicate vertex id '" + g.vertices_[v] + "'");
  }
  auto lookup = [&](const std::string& vid, const std::string& eid) {
    auto it = g.vertex_index_.find(vid);
    if (it == g.vertex_index_.end())
      throw validation_error("edge '" + eid + "' names unknown vertex '" + vid + "'");
    return it->second;
  };
  for (std::size_t i = 0; i < internal.size(); ++i) {
    const auto& s = internal[i];
    if (!(s.length > 0.0) || !std::isfinite(s.length))
      throw validation_error("edge '" + s.id + "' has nonpositive or non-finite length");
    g.internal_.push_back({s.id, lookup(s.from, s.id), lookup(s.to, s.id), s.length});
    if (!g.edge_index_.emplace(s.id, EdgeRef{false, i}).second)
      throw validation_error("duplicate edge id '" + s.id + "'");
  }
  for (std::size_t e = 0; e < external.size(); ++e) {
    const auto& s = external[e];
    g.external_.push_back({s.id, lookup(s.vertex, s.id)});
    if (!g.edge_index_.emplace(s.id, EdgeRef{true, e}).second)
      throw validation_error("duplicate edge id '" + s.id + "'");
  }

  const std::size_t nk = g.num_slots();
  g.stars_.assign(g.vertices_.size(), {});
  g.slot_vertex_.resize(nk);
  g.slot_local_.resize(nk);
  for (std::size_t s = 0; s < nk; ++s) {
    std::size_t v = 0;
    switch (g.slot_kind(s)) {
      case EndKind::External: v = g.external_[g.slot_edge_index(s)].vertex; break;
      case EndKind::Initial: v = g.internal_[g.slot_edge_index(s)].from; break;
      case EndKind::Terminal: v = g.internal_[g.slot_edge_index(s)].to; break;
    }
    g.slot_vertex_[s] = v;
    g.slot_local_[s] = g.stars_[v].size();
    g.stars_[v].push_back(s);
  }

  for (std::size_t v = 0; v < g.vertices_.size(); ++v) {
    if (g.stars_[v].empty()) throw validation_error("vertex '" + g.vertices_[v] + "' has degree 0");
  }
  DisjointSets ds(g.vertices_.size());
  for (const auto& e : g.internal_) ds.unite(e.from, e.to);
  const auto root = ds.find(0);
  for (std::size_t v = 1; v < g.vertices_.size(); ++v) {
    if (ds.find(v) != root) throw validation_error("graph is not connected (vertex '" + g.vertices_[v] + "')");
  }
  return g;
}

std::optional<std::size_t> MetricGraph::find_vertex(const std::string& id) const {
  auto it = vertex_index_.find(id);
  if (it == vertex_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeRef> MetricGraph::find_edge(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

EdgeRef MetricGraph::edge(const std::string& id) const {
  auto e = find_edge(id);
  if (!e) throw precondition_error("unknown-edge", "unknown edge id '" + id + "'");
  return *e;
}

const std::string& MetricGraph::edge_id(EdgeRef e) const {
  return e.external ? external_.at(e.index).id : internal_.at(e.index).id;
}

double MetricGraph::edge_length(EdgeRef e) const {
  return e.external ? std::numeric_limits<double>::infinity() : internal_.at(e.index).length;
}

std::size_t MetricGraph::slot(EndKind kind, std::size_t edge) const {
  switch (kind) {
    case EndKind::External: return edge;
    case EndKind::Initial: return external_.size() + edge;
    case EndKind::Terminal: return external_.size() + internal_.size() + edge;
  }
  return 0;
}

EndKind MetricGraph::slot_kind(std::size_t slot) const {
  if (slot < external_.size()) return EndKind::External;
  if (slot < external_.size() + internal_.size()) return EndKind::Initial;
  return EndKind::Terminal;
}

std::size_t MetricGraph::slot_edge_index(std::size_t slot) const {
  if (slot < external_.size()) return slot;
  slot -= external_.size();
  return slot < internal_.size() ? slot : slot - internal_.size();
}

EdgeRef MetricGraph::slot_edge(std::size_t slot) const {
  return {slot_kind(slot) == EndKind::External, slot_edge_index(slot)};
}

std::optional<std::size_t> MetricGraph::partner(std::size_t slot) const {
  switch (slot_kind(slot)) {
    case EndKind::External: return std::nullopt;
    case EndKind::Initial: return slot + internal_.size();
    case EndKind::Terminal: return slot - internal_.size();
  }
  return std::nullopt;
}

std::vector<std::size_t> MetricGraph::slots_of(EdgeRef e) const {
  if (e.external) return {slot(EndKind::External, e.index)};
  return {slot(EndKind::Initial, e.index), slot(EndKind::Terminal, e.index)};
}

std::optional<std::size_t> MetricGraph::slot_at(EdgeRef e, std::size_t v) const {
  for (auto s : slots_of(e))
    if (slot_vertex_[s] == v) return s;
  return std::nullopt;
}

bool MetricGraph::has_tadpoles() const {
  return std::any_of(internal_.begin(), internal_.end(), [](const auto& e) { return e.from == e.to; });
}

double MetricGraph::total_length() const {
  double L = 0.0;
  for (const auto& e : internal_) L += e.length;
  return L;
}

double MetricGraph::min_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : internal_) m = std::min(m, e.length);
  return m;
}

double MetricGraph::max_length() const {
  double m = 0.0;
  for (const auto& e : internal_) m = std::max(m, e.length);
  return m;
}

ValidationReport validate(const MetricGraph& g) {
  ValidationReport r;
  r.num_vertices = g.num_vertices();
  r.num_internal = g.num_internal();
  r.num_external = g.num_external();
  r.compact = g.is_compact();
  r.has_tadpoles = g.has_tadpoles();
  r.total_length = g.total_length();
  r.euler_number = static_cast<long long>(g.num_internal()) - static_cast<long long>(g.num_vertices());

  long long deg_sum = 0;
  long long twice_curvature = 0;  // Σ (deg − 2) = 2 Σ (deg/2 − 1)
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    r.degrees[g.vertices()[v]] = g.degree(v);
    deg_sum += static_cast<long long>(g.degree(v));
    twice_curvature += static_cast<long long>(g.degree(v)) - 2;
  }
  r.degree_sum_ok = deg_sum == static_cast<long long>(g.num_external() + 2 * g.num_internal());
  r.gauss_bonnet_ok = twice_curvature == 2 * r.euler_number + static_cast<long long>(g.num_external());

  DisjointSets ds(g.num_vertices());
  for (const auto& e : g.internal_edges()) ds.unite(e.from, e.to);
  r.connected = true;
  for (std::size_t v = 1; v < g.num_vertices(); ++v) r.connected = r.connected && ds.find(v) == ds.find(0);
  return r;
}

void require_tadpole_free(const MetricGraph& g, const char* operation) {
  for (const auto& e : g.internal_edges()) {
    if (e.from == e.to)
      throw precondition_error("tadpole-present",
                               std::string(operation) + " requires a graph without tadpoles (edge '" + e.id + "')");
  }
}

}  // namespace qgraph

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace qgraph {

/// Which end of an edge a boundary slot belongs to.
enum class EndKind { External, Initial, Terminal };

/// Reference to an edge by kind and position in its (file-ordered) list.
struct EdgeRef {
  bool external = false;
  std::size_t index = 0;

  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
  friend auto operator<=>(const EdgeRef&, const EdgeRef&) = default;
};

struct InternalEdge {
  std::string id;
  std::size_t from = 0;  // initial vertex, x = 0
  std::size_t to = 0;    // terminal vertex, x = length
  double length = 0.0;
};

struct ExternalEdge {
  std::string id;
  std::size_t vertex = 0;
};

/// Input records for MetricGraph::create, endpoints named by vertex id.
struct InternalEdgeSpec {
  std::string id, from, to;
  double length = 0.0;
};
struct ExternalEdgeSpec {
  std::string id, vertex;
};

/// A finite connected metric graph with internal edges [0, a_i] and
/// external half-lines [0, ∞).
///
/// Boundary slots (the space K) are laid out as
///   external edges | initial ends of internal edges | terminal ends,
/// each block in file order. The star of a vertex lists its slots in the
/// same order, so every per-vertex matrix uses the restriction of the global
/// layout. Immutable after construction.
class MetricGraph {
 public:
  /// Validates ids, endpoints, lengths and connectivity; throws
  /// qgraph::Error (Validation) on failure. Tadpoles are allowed here.
  static MetricGraph create(std::vector<std::string> vertices, const std::vector<InternalEdgeSpec>& internal,
                            const std::vector<ExternalEdgeSpec>& external);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_internal() const { return internal_.size(); }
  std::size_t num_external() const { return external_.size(); }
  /// dim K = |E| + 2|I|.
  std::size_t num_slots() const { return external_.size() + 2 * internal_.size(); }

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<InternalEdge>& internal_edges() const { return internal_; }
  const std::vector<ExternalEdge>& external_edges() const { return external_; }
  const InternalEdge& internal(std::size_t i) const { return internal_.at(i); }
  const ExternalEdge& external(std::size_t e) const { return external_.at(e); }

  std::optional<std::size_t> find_vertex(const std::string& id) const;
  std::optional<EdgeRef> find_edge(const std::string& id) const;
  /// Like find_edge but throws a precondition error naming the id.
  EdgeRef edge(const std::string& id) const;
  const std::string& edge_id(EdgeRef e) const;
  double edge_length(EdgeRef e) const;  // +inf for external edges

  std::size_t degree(std::size_t v) const { return stars_.at(v).size(); }
  /// Slots incident to v in canonical order.
  const std::vector<std::size_t>& star(std::size_t v) const { return stars_.at(v); }

  std::size_t slot(EndKind kind, std::size_t edge) const;
  EndKind slot_kind(std::size_t slot) const;
  std::size_t slot_edge_index(std::size_t slot) const;
  EdgeRef slot_edge(std::size_t slot) const;
  std::size_t slot_vertex(std::size_t slot) const { return slot_vertex_.at(slot); }
  /// Position of the slot within the star of its vertex.
  std::size_t slot_local_index(std::size_t slot) const { return slot_local_.at(slot); }
  /// The other end of an internal edge; nullopt for external slots.
  std::optional<std::size_t> partner(std::size_t slot) const;
  /// Slots of an edge: one for external, (initial, terminal) for internal.
  std::vector<std::size_t> slots_of(EdgeRef e) const;
  /// Slot of edge e at vertex v, if incident (first match for tadpoles).
  std::optional<std::size_t> slot_at(EdgeRef e, std::size_t v) const;

  bool is_compact() const { return external_.empty(); }
  bool has_tadpoles() const;
  bool is_tadpole(std::size_t i) const { return internal_.at(i).from == internal_.at(i).to; }
  double total_length() const;
  double min_length() const;  // over internal edges; +inf if none
  double max_length() const;  // over internal edges; 0 if none

 private:
  MetricGraph() = default;

  std::vector<std::string> vertices_;
  std::vector<InternalEdge> internal_;
  std::vector<ExternalEdge> external_;
  std::unordered_map<std::string, std::size_t> vertex_index_;
  std::unordered_map<std::string, EdgeRef> edge_index_;
  std::vector<std::vector<std::size_t>> stars_;
  std::vector<std::size_t> slot_vertex_;
  std::vector<std::size_t> slot_local_;
};

struct ValidationReport {
  bool connected = false;
  bool has_tadpoles = false;
  bool degree_sum_ok = false;
  /// Σ_v (deg(v)/2 − 1) == |I| − |V| + |E|/2, checked on integers; for compact
  /// graphs this is the discrete Gauss-Bonnet identity.
  bool gauss_bonnet_ok = false;
  std::map<std::string, std::size_t> degrees;
  double total_length = 0.0;
  /// |I| − |V| (sign convention of the trace formula's topological term).
  long long euler_number = 0;
  std::size_t num_vertices = 0, num_internal = 0, num_external = 0;
  bool compact = false;
};

ValidationReport validate(const MetricGraph& g);

/// Throws precondition_error("tadpole-present") if g has a tadpole.
void require_tadpole_free(const MetricGraph& g, const char* operation);

}  // namespace qgraph

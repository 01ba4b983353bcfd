#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

/// A walk {j, v_0, j_1, v_1, ..., j_n, v_n, j'}. Trivial walks have no
/// interior edges and a single vertex.
struct Walk {
  EdgeRef from, to;
  std::vector<std::size_t> vertices;  // v_0 .. v_n
  std::vector<std::size_t> interior;  // internal edge indices j_1 .. j_n
  std::vector<std::uint32_t> score;   // per internal edge
  double length = 0.0;
  cplx weight{1.0, 0.0};
  bool zero_weight = false;

  std::size_t comb_length() const { return interior.size(); }
  bool trivial() const { return interior.empty(); }
  std::size_t v_minus() const { return vertices.front(); }
  std::size_t v_plus() const { return vertices.back(); }
};

/// Product of [𝔖_{v_l}]_{i_{l+1}, i_l} along the walk.
cplx walk_weight(const MetricGraph& g, const Matrix& S, const Walk& w);

/// All walks from j to j' with metric length ≤ lambda, ordered by
/// (combinatorial length, vertex/edge sequence). Requires a tadpole-free graph
/// and k-independent boundary data.
std::vector<Walk> enumerate_walks(const MetricGraph& g, const BoundaryData& data, EdgeRef j, EdgeRef jp,
                                  double lambda);

/// One directed traversal of an internal edge, identified by the vertex it
/// arrives at.
struct Traversal {
  std::size_t edge = 0;
  std::size_t head = 0;

  friend bool operator==(const Traversal&, const Traversal&) = default;
  friend auto operator<=>(const Traversal&, const Traversal&) = default;
};

/// A cycle stored as its canonical (lexicographically minimal) rotation of
/// traversals. weight = base_weight^power, length = power · base length.
struct Cycle {
  std::vector<Traversal> steps;
  double length = 0.0;
  cplx weight{1.0, 0.0};
  cplx base_weight{1.0, 0.0};
  std::size_t power = 1;

  bool primitive() const { return power == 1; }
  bool zero_weight() const { return weight == cplx{}; }
  std::size_t comb_length() const { return steps.size(); }
};

/// Builds the canonical cycle from any rotation of a closed traversal
/// sequence. Throws Validation if the steps do not close up.
Cycle make_cycle(const MetricGraph& g, const Matrix& S, std::vector<Traversal> steps);

/// Walk representation {j, v_0, j_1, ..., v_n, j} of the canonical rotation,
/// as edge and vertex ids.
std::vector<std::string> cycle_representative(const MetricGraph& g, const Cycle& c);

Cycle reversed(const MetricGraph& g, const Matrix& S, const Cycle& c);

/// (primitive base, p) with c = p · base.
std::pair<Cycle, std::size_t> primitive_decompose(const Cycle& c);

/// Φ(𝔠) = Σ over visited vertices of φ(arriving slot) − φ(leaving slot).
/// `slot_phases` has one entry per slot.
double cycle_flux(const MetricGraph& g, const Cycle& c, const std::vector<double>& slot_phases);

/// Same, with phases given per (vertex id, edge id). Throws Validation
/// "missing-phase" if an incidence on the cycle has no phase.
double cycle_flux(const MetricGraph& g, const Cycle& c,
                  const std::map<std::string, std::map<std::string, double>>& phases);

/// Lightweight view handed to cycle visitors; valid only during the call.
struct CycleView {
  std::span<const Traversal> steps;
  double length;
  cplx weight;
  cplx base_weight;
  std::size_t power;
};

/// Calls visit(root, cycle) once for every cycle with length ≤ lambda. Roots
/// index the 2|I| traversals that start canonical representatives; distinct
/// roots may be processed concurrently on up to `threads` threads, but each
/// root's cycles arrive sequentially in a fixed order. Returns the number of
/// cycles visited. Throws Numeric "cutoff-overflow" beyond max_nodes search
/// nodes in total.
std::size_t visit_cycles(const MetricGraph& g, const Matrix& S, double lambda,
                         const std::function<void(std::size_t, const CycleView&)>& visit, unsigned threads = 1,
                         std::size_t max_nodes = 200'000'000);

std::size_t num_cycle_roots(const MetricGraph& g);

/// All cycles with length ≤ lambda, sorted by (length, steps). Requires a
/// tadpole-free graph and k-independent data.
std::vector<Cycle> enumerate_cycles(const MetricGraph& g, const BoundaryData& data, double lambda,
                                    unsigned threads = 1);

/// Aggregated walk sums from `from` to `to` for one score and one pair of
/// end slots: `weight` is the sum of W over all such walks, `count` their
/// number.
struct ScoreSum {
  std::vector<std::uint32_t> score;
  std::size_t comb_length = 0;
  std::size_t from_slot = 0;  // slot of `from` at v_-(w)
  std::size_t to_slot = 0;    // slot of `to` at v_+(w)
  cplx weight;
  double count = 0.0;
};

/// All (score, end slots) classes of walks with combinatorial length ≤
/// max_comb, in deterministic order. Throws Numeric "cutoff-overflow" once
/// more than max_states states would be expanded.
std::vector<ScoreSum> score_walk_sums(const MetricGraph& g, const Matrix& S, EdgeRef from, EdgeRef to,
                                      std::size_t max_comb, std::size_t max_states = 10'000'000);

}  // namespace qgraph

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

enum class Preset { Dirichlet, Neumann, Standard, Custom };

const char* to_string(Preset p);
std::optional<Preset> preset_from_string(const std::string& s);

/// Boundary condition A ψ + B ψ' = 0 at one vertex. Rows and columns are
/// indexed by the star of the vertex in canonical slot order.
struct VertexBC {
  std::size_t vertex = 0;
  Matrix A, B;
  Preset preset = Preset::Custom;

  std::size_t degree() const { return static_cast<std::size_t>(A.rows()); }
};

/// Builds the matrices of a preset, or validates the custom pair. Standard
/// conditions on a degree-1 vertex are Neumann (A = 0, B = 1).
/// Throws Validation "invalid-bc" when (A, B) is rank deficient or AB† is
/// not self-adjoint.
VertexBC build_vertex_bc(std::size_t vertex, std::size_t degree, Preset preset,
                         const std::optional<std::pair<Matrix, Matrix>>& custom = std::nullopt);

/// Maximal rank and AB† = BA†, with the tolerances used throughout.
void check_vertex_bc(const VertexBC& bc);

/// AB† = 0 up to 1e-12 · max(‖A‖_max, ‖B‖_max)².
bool is_k_independent(const VertexBC& bc);

/// 𝔖(k; A, B) = −(A + ikB)⁻¹(A − ikB). Unitary for real k > 0; k may be
/// complex (used by the Green's function off the real axis).
Matrix vertex_scattering(const VertexBC& bc, cplx k);

/// The dual conditions (B, −A), i.e. the orthogonal complement subspace.
VertexBC dual(const VertexBC& bc);

/// Local boundary data: one VertexBC per vertex (indexed like the graph's
/// vertices) plus accumulated magnetic phases per slot.
struct BoundaryData {
  std::vector<VertexBC> vertices;
  /// φ at each slot of K; empty when no magnetic perturbation was applied.
  std::vector<double> magnetic;

  bool has_magnetic() const { return !magnetic.empty(); }
  bool k_independent() const;
  /// True when every vertex carries the tag. Magnetic perturbations keep the
  /// tag of the unperturbed condition.
  bool all_preset(Preset p) const;
};

BoundaryData uniform_boundary(const MetricGraph& g, Preset preset);

/// Checks one condition per vertex with matching dimensions.
void check_boundary(const MetricGraph& g, const BoundaryData& data);

/// Per-(vertex, edge id) phases from a document; vertices without an entry
/// get zero phases. Each listed vertex must cover exactly its star.
std::vector<double> magnetic_phases_from_map(const MetricGraph& g,
                                             const std::map<std::string, std::map<std::string, double>>& phases);

/// A(v) → A(v)U_v, B(v) → B(v)U_v with U_v = diag(e^{iφ_j(v)}).
/// `slot_phases` has one entry per slot of K.
BoundaryData apply_magnetic(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& slot_phases);

struct GlobalScattering {
  Matrix S;  // (|E| + 2|I|)², block diagonal over vertices in slot order
  bool k_independent = false;
};

GlobalScattering assemble_global_scattering(const MetricGraph& g, const BoundaryData& data, cplx k);

/// 𝔖(M) for k-independent data; throws Precondition "not-k-independent" otherwise.
Matrix k_independent_scattering(const MetricGraph& g, const BoundaryData& data);

}  // namespace qgraph

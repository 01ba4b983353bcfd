#include "qgraph/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "qgraph/errors.hpp"

namespace qgraph {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kSelfAdjointTol = 1e-10;
constexpr double kZeroTol = 1e-12;

double bc_scale(const VertexBC& bc) { return std::max({max_abs(bc.A), max_abs(bc.B), 1e-300}); }

}  // namespace

const char* to_string(Preset p) {
  switch (p) {
    case Preset::Dirichlet: return "dirichlet";
    case Preset::Neumann: return "neumann";
    case Preset::Standard: return "standard";
    case Preset::Custom: return "custom";
  }
  return "custom";
}

std::optional<Preset> preset_from_string(const std::string& s) {
  if (s == "dirichlet") return Preset::Dirichlet;
  if (s == "neumann") return Preset::Neumann;
  if (s == "standard") return Preset::Standard;
  if (s == "custom") return Preset::Custom;
  return std::nullopt;
}

VertexBC build_vertex_bc(std::size_t vertex, std::size_t degree, Preset preset,
                         const std::optional<std::pair<Matrix, Matrix>>& custom) {
  if (degree == 0) throw validation_error("boundary condition needs degree >= 1");
  const auto n = static_cast<Eigen::Index>(degree);
  VertexBC bc{vertex, Matrix::Zero(n, n), Matrix::Zero(n, n), preset};
  switch (preset) {
    case Preset::Dirichlet: bc.A.setIdentity(); break;
    case Preset::Neumann: bc.B.setIdentity(); break;
    case Preset::Standard:
      if (n == 1) {
        bc.B(0, 0) = 1.0;
      } else {
        for (Eigen::Index r = 0; r + 1 < n; ++r) {
          bc.A(r, r) = 1.0;
          bc.A(r, r + 1) = -1.0;
        }
        bc.B.row(n - 1).setOnes();
      }
      break;
    case Preset::Custom:
      if (!custom) throw validation_error("custom boundary condition requires A and B");
      if (custom->first.rows() != n || custom->first.cols() != n || custom->second.rows() != n ||
          custom->second.cols() != n)
        throw validation_error("custom boundary matrices must be " + std::to_string(degree) + "x" +
                               std::to_string(degree));
      bc.A = custom->first;
      bc.B = custom->second;
      break;
  }
  check_vertex_bc(bc);
  return bc;
}

void check_vertex_bc(const VertexBC& bc) {
  const auto n = bc.A.rows();
  if (bc.A.cols() != n || bc.B.rows() != n || bc.B.cols() != n)
    throw Error(ErrorKind::Validation, "invalid-bc", "A and B must be square of equal size");
  if (!bc.A.allFinite() || !bc.B.allFinite())
    throw Error(ErrorKind::Validation, "invalid-bc", "non-finite boundary matrix entry");
  Matrix AB(n, 2 * n);
  AB << bc.A, bc.B;
  Eigen::JacobiSVD<Matrix> svd(AB);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0) || sv(sv.size() - 1) < kRankTol * sv(0))
    throw Error(ErrorKind::Validation, "invalid-bc", "(A, B) does not have maximal rank");
  const double s = bc_scale(bc);
  const Matrix ABt = bc.A * bc.B.adjoint();
  if (max_abs(ABt - ABt.adjoint()) > kSelfAdjointTol * s * s)
    throw Error(ErrorKind::Validation, "invalid-bc", "A B^dagger is not self-adjoint");
}

bool is_k_independent(const VertexBC& bc) {
  const double s = bc_scale(bc);
  return max_abs(bc.A * bc.B.adjoint()) <= kZeroTol * s * s;
}

Matrix vertex_scattering(const VertexBC& bc, cplx k) {
  const Matrix lhs = bc.A + kI * k * bc.B;
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (!lu.isInvertible())
    throw numeric_error("singular-matrix", "A + ikB is not invertible at k = " + std::to_string(k.real()) + "+" +
                                               std::to_string(k.imag()) + "i");
  return -lu.solve(bc.A - kI * k * bc.B);
}

VertexBC dual(const VertexBC& bc) { return {bc.vertex, bc.B, -bc.A, Preset::Custom}; }

bool BoundaryData::k_independent() const {
  return std::all_of(vertices.begin(), vertices.end(), [](const VertexBC& v) { return is_k_independent(v); });
}

bool BoundaryData::all_preset(Preset p) const {
  return std::all_of(vertices.begin(), vertices.end(), [p](const VertexBC& v) { return v.preset == p; });
}

BoundaryData uniform_boundary(const MetricGraph& g, Preset preset) {
  BoundaryData d;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) d.vertices.push_back(build_vertex_bc(v, g.degree(v), preset));
  return d;
}

void check_boundary(const MetricGraph& g, const BoundaryData& data) {
  if (data.vertices.size() != g.num_vertices())
    throw validation_error("boundary data must provide one condition per vertex");
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (data.vertices[v].vertex != v || data.vertices[v].degree() != g.degree(v))
      throw validation_error("boundary condition at '" + g.vertices()[v] + "' has wrong dimension");
  }
  if (data.has_magnetic() && data.magnetic.size() != g.num_slots())
    throw validation_error("magnetic phases must cover every slot");
}

std::vector<double> magnetic_phases_from_map(const MetricGraph& g,
                                             const std::map<std::string, std::map<std::string, double>>& phases) {
  std::vector<double> out(g.num_slots(), 0.0);
  for (const auto& [vid, edges] : phases) {
    auto v = g.find_vertex(vid);
    if (!v) throw validation_error("magnetic phases name unknown vertex '" + vid + "'");
    for (const auto& [eid, phi] : edges) {
      auto e = g.find_edge(eid);
      if (!e) throw validation_error("magnetic phases name unknown edge '" + eid + "'");
      if (!e->external && g.is_tadpole(e->index))
        throw validation_error("magnetic phase on tadpole '" + eid + "' is ambiguous");
      auto s = g.slot_at(*e, *v);
      if (!s) throw validation_error("edge '" + eid + "' is not incident to vertex '" + vid + "'");
      out[*s] = phi;
    }
    if (edges.size() != g.degree(*v))
      throw validation_error("magnetic phases at '" + vid + "' must cover exactly its star");
  }
  return out;
}

BoundaryData apply_magnetic(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& slot_phases) {
  check_boundary(g, data);
  if (slot_phases.size() != g.num_slots()) throw validation_error("phase map does not match the graph's slots");
  BoundaryData out = data;
  if (out.magnetic.empty()) out.magnetic.assign(g.num_slots(), 0.0);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const auto& star = g.star(v);
    Vector u(static_cast<Eigen::Index>(star.size()));
    for (std::size_t l = 0; l < star.size(); ++l) {
      u(static_cast<Eigen::Index>(l)) = std::polar(1.0, slot_phases[star[l]]);
      out.magnetic[star[l]] += slot_phases[star[l]];
    }
    auto& bc = out.vertices[v];
    bc.A = bc.A * u.asDiagonal();
    bc.B = bc.B * u.asDiagonal();
  }
  return out;
}

GlobalScattering assemble_global_scattering(const MetricGraph& g, const BoundaryData& data, cplx k) {
  check_boundary(g, data);
  const auto n = static_cast<Eigen::Index>(g.num_slots());
  GlobalScattering out{Matrix::Zero(n, n), data.k_independent()};
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const Matrix local = vertex_scattering(data.vertices[v], k);
    const auto& star = g.star(v);
    for (std::size_t r = 0; r < star.size(); ++r)
      for (std::size_t c = 0; c < star.size(); ++c)
        out.S(static_cast<Eigen::Index>(star[r]), static_cast<Eigen::Index>(star[c])) =
            local(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  return out;
}

Matrix k_independent_scattering(const MetricGraph& g, const BoundaryData& data) {
  if (!data.k_independent())
    throw precondition_error("not-k-independent", "operation requires k-independent boundary conditions (AB^dagger = 0)");
  return assemble_global_scattering(g, data, cplx{1.0, 0.0}).S;
}

}  // namespace qgraph

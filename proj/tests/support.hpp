#pragma once

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/io.hpp"
#include "qgraph/linalg.hpp"

namespace testing {

using qgraph::cplx;
using qgraph::Matrix;

inline qgraph::GraphDocument fixture(const std::string& name) {
  return qgraph::load_document_file(std::string(QGRAPH_TEST_DATA) + "/" + name + ".json");
}

inline Matrix random_gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> N;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {N(rng), N(rng)};
  return m;
}

inline Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(rng, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

/// (A, B) realizing 𝔖(1) = U†, multiplied on the left by a random invertible C.
/// With k_independent the unitary is I − 2P for a random projection P.
inline std::pair<Matrix, Matrix> random_bc(std::mt19937_64& rng, Eigen::Index n, bool k_independent) {
  Matrix U;
  if (k_independent) {
    const Matrix Q = random_unitary(rng, n);
    const auto rank = std::uniform_int_distribution<Eigen::Index>(0, n)(rng);
    Matrix P = Matrix::Zero(n, n);
    for (Eigen::Index r = 0; r < rank; ++r) P += Q.col(r) * Q.col(r).adjoint();
    U = Matrix::Identity(n, n) - 2.0 * P;
  } else {
    U = random_unitary(rng, n);
  }
  const Matrix I = Matrix::Identity(n, n);
  const Matrix C = random_gaussian(rng, n) + 3.0 * I;
  return {C * (U - I) / 2.0, C * (U + I) / cplx(0.0, 2.0)};
}

/// Walk found by the exhaustive oracle: interior edges and vertex sequence.
struct OracleWalk {
  std::vector<std::size_t> interior, vertices;
  cplx weight;
  friend bool operator<(const OracleWalk& a, const OracleWalk& b) {
    return std::tie(a.interior, a.vertices) < std::tie(b.interior, b.vertices);
  }
};

/// Index of edge `slot_edge` within the star of v, by linear search over
/// the endpoints (independent of the slot bookkeeping in the library).
inline std::size_t local_index(const qgraph::MetricGraph& g, std::size_t v, qgraph::EdgeRef e) {
  std::size_t pos = 0;
  for (std::size_t x = 0; x < g.num_external(); ++x)
    if (g.external(x).vertex == v) {
      if (e.external && e.index == x) return pos;
      ++pos;
    }
  for (std::size_t i = 0; i < g.num_internal(); ++i)
    if (g.internal(i).from == v) {
      if (!e.external && e.index == i) return pos;
      ++pos;
    }
  for (std::size_t i = 0; i < g.num_internal(); ++i)
    if (g.internal(i).to == v) {
      if (!e.external && e.index == i) return pos;
      ++pos;
    }
  throw std::logic_error("edge not incident");
}

inline bool touches(const qgraph::MetricGraph& g, qgraph::EdgeRef e, std::size_t v) {
  if (e.external) return g.external(e.index).vertex == v;
  return g.internal(e.index).from == v || g.internal(e.index).to == v;
}

/// All walks from j to jp with length ≤ lambda by expanding every sequence
/// of internal edges and every vertex sequence, then filtering. Weights use
/// the per-vertex matrices 𝔖_v directly.
inline std::vector<OracleWalk> brute_force_walks(const qgraph::MetricGraph& g, const qgraph::BoundaryData& data,
                                                 qgraph::EdgeRef j, qgraph::EdgeRef jp, double lambda) {
  std::vector<Matrix> Sv;
  for (const auto& bc : data.vertices) Sv.push_back(qgraph::vertex_scattering(bc, cplx{1.0, 0.0}));
  const std::size_t nI = g.num_internal(), nV = g.num_vertices();
  std::vector<OracleWalk> out;
  for (std::size_t n = 0;; ++n) {
    // smallest possible length of n interior edges
    if (n > 0 && double(n) * g.min_length() > lambda * (1.0 + 1e-12)) break;
    std::size_t edge_count = 1, vert_count = 1;
    for (std::size_t l = 0; l < n; ++l) edge_count *= nI;
    for (std::size_t l = 0; l <= n; ++l) vert_count *= nV;
    for (std::size_t ec = 0; ec < edge_count; ++ec) {
      std::vector<std::size_t> edges(n);
      std::size_t c = ec;
      double len = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        edges[l] = c % nI;
        c /= nI;
        len += g.internal(edges[l]).length;
      }
      if (len > lambda * (1.0 + 1e-12)) continue;
      for (std::size_t vc = 0; vc < vert_count; ++vc) {
        std::vector<std::size_t> verts(n + 1);
        std::size_t d = vc;
        for (auto& v : verts) {
          v = d % nV;
          d /= nV;
        }
        bool ok = touches(g, j, verts[0]) && touches(g, jp, verts[n]);
        for (std::size_t l = 0; l < n && ok; ++l) {
          const auto& e = g.internal(edges[l]);
          ok = (e.from == verts[l] && e.to == verts[l + 1]) || (e.to == verts[l] && e.from == verts[l + 1]);
        }
        if (!ok) continue;
        cplx w{1.0, 0.0};
        qgraph::EdgeRef prev = j;
        for (std::size_t l = 0; l <= n; ++l) {
          const qgraph::EdgeRef next = l < n ? qgraph::EdgeRef{false, edges[l]} : jp;
          const auto in = static_cast<Eigen::Index>(local_index(g, verts[l], prev));
          const auto outi = static_cast<Eigen::Index>(local_index(g, verts[l], next));
          w *= Sv[verts[l]](outi, in);
          prev = next;
        }
        out.push_back({edges, verts, w});
      }
    }
  }
  return out;
}

}  // namespace testing

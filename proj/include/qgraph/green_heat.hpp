#pragma once

#include <cstddef>
#include <string>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

/// A point x on edge `edge`: x ∈ [0, a] for internal edges (x = 0 at the
/// initial vertex), x ≥ 0 on external edges.
struct EdgePoint {
  EdgeRef edge;
  double x = 0.0;
};

/// Validates the coordinate range; throws Validation.
EdgePoint make_point(const MetricGraph& g, const std::string& edge_id, double x);

/// Free Gaussian g_t(u) = exp(−u²/4t)/√(4πt), flushed to 0 below e^{-700}.
double gaussian_kernel(double t, double u);

/// Green's function r_{j,j'}(x, y; k) for Im k > 0 from the resolvent formula.
/// Works for arbitrary (not necessarily k-independent) local conditions.
cplx green_closed(const MetricGraph& g, const BoundaryData& data, cplx k, const EdgePoint& x, const EdgePoint& y);

struct SeriesResult {
  cplx value;
  double walks_used = 0.0;      // number of walks summed
  std::size_t comb_cutoff = 0;  // walks of combinatorial length ≤ comb_cutoff were summed
  double cutoff_length = 0.0;   // every omitted walk is at least this long
  double tail_bound = 0.0;      // certified bound on the omitted part
};

/// Walk expansion of the Green's function truncated at a certified error ≤ eps.
/// Needs k-independent data and no tadpoles.
SeriesResult green_series(const MetricGraph& g, const BoundaryData& data, cplx k, const EdgePoint& x,
                          const EdgePoint& y, double eps, std::size_t max_terms = 1'000'000);

/// Heat kernel p_t(x, y) as the walk expansion truncated at a certified error
/// ≤ eps. Needs k-independent data and no tadpoles.
SeriesResult heat_kernel(const MetricGraph& g, const BoundaryData& data, double t, const EdgePoint& x,
                         const EdgePoint& y, double eps, std::size_t max_states = 10'000'000);

/// Smallest combinatorial cutoff N whose heat-series tail bound is ≤ eps,
/// with the bound itself.
std::pair<std::size_t, double> heat_series_cutoff(const MetricGraph& g, const Matrix& S, double t, double eps);

}  // namespace qgraph

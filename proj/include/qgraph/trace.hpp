#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

/// Reference operator on the external edges: Neumann gives the "+" and
/// Dirichlet the "−" version of the trace identity.
enum class CompareSign { Neumann, Dirichlet };

const char* to_string(CompareSign s);
CompareSign compare_sign_from_string(const std::string& s);

struct CycleTrace {
  std::vector<double> t;
  std::vector<cplx> value;           // full cycle side
  std::vector<double> weyl;          // L / (2√(πt))
  double constant = 0.0;             // ¼ tr 𝔖 ∓ |E|/4
  std::vector<cplx> cycle_sum;       // periodic-orbit part
  std::vector<double> tail_bound;    // certified bound on omitted cycles
  double cutoff_length = 0.0;        // cycles with |𝔠| ≤ cutoff were summed
  std::size_t cycles_used = 0;
};

/// Cycle side of the heat-trace identity for every t in the grid, using one
/// cycle enumeration with a cutoff chosen so each tail bound is ≤ eps.
/// Requires a tadpole-free graph and k-independent data.
CycleTrace heat_trace_cycles(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& t, double eps,
                             CompareSign sign = CompareSign::Neumann, unsigned threads = 1);

/// Certified bound on Σ over cycles longer than `cutoff` of
/// |W(𝔠)^p| |𝔠_prim| e^{−|𝔠|²/4t} / (2√(πt)).
double cycle_tail_bound(const MetricGraph& g, const Matrix& S, double t, double cutoff);

/// Smallest cutoff (to 1% accuracy) whose tail bound is ≤ eps.
double cycle_cutoff(const MetricGraph& g, const Matrix& S, double t, double eps);

struct SpectralTrace {
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> error_bound;  // truncation (compact) or quadrature (noncompact) estimate
  double k_max = 0.0;               // spectrum / phase used up to this k
};

/// Spectral side: Σ e^{−tλ} over eigenvalues for compact graphs, and
/// −t∫ξ(λ)e^{−tλ}dλ (with the |E|/2 shift for the Dirichlet reference) for
/// noncompact graphs.
SpectralTrace heat_trace_spectral(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& t,
                                  double eps, CompareSign sign = CompareSign::Neumann);

struct TraceReport {
  CompareSign sign = CompareSign::Neumann;
  double eps = 0.0;
  CycleTrace cycles;
  SpectralTrace spectral;
  std::vector<double> abs_discrepancy;
  std::vector<double> rel_discrepancy;
  std::vector<bool> failed;  // discrepancy > 10 eps
  bool ok = true;
};

TraceReport compare_traces(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& t, double eps,
                           CompareSign sign = CompareSign::Neumann, unsigned threads = 1);

}  // namespace qgraph

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"
#include "qgraph/spectral.hpp"

namespace qgraph {

/// One length of the reduced length spectrum with the amplitude
/// Σ W(𝔠)·|𝔠_prim| over every cycle (primitive or not) of that length.
struct LengthGroup {
  double length = 0.0;
  cplx amplitude;
  std::size_t cycles = 0;  // cycles with nonzero weight
};

/// Cycles with length ≤ lambda grouped by length (tolerance 1e-9); groups
/// with |amplitude| < 1e-12 are dropped. Ascending in length.
std::vector<LengthGroup> reduced_length_spectrum(const MetricGraph& g, const BoundaryData& data, double lambda,
                                                 unsigned threads = 1);

struct LengthPeak {
  double omega = 0.0;
  double amplitude = 0.0;  // comparable to LengthGroup::amplitude
  double height = 0.0;     // |F − background| at the peak
};

struct RecoveryOptions {
  double omega_max = 10.0;
  /// Gaussian width in ω; the taper in k is e^{−k²/2K²} with K = 1/σ.
  /// Non-positive means σ = 5/k_max.
  double sigma = 0.0;
  double rel_floor = 0.05;
};

struct LengthRecovery {
  std::vector<double> omega;
  std::vector<double> transform;  // F(ω)
  std::vector<LengthPeak> peaks;
  double sigma = 0.0;
  double k_max = 0.0;
  double background = 0.0;
  double floor = 0.0;
  double jump_at_zero = 0.0;  // 2u(0+)
  double length_estimate = 0.0;  // total length used for the Weyl subtraction
};

/// Windowed transform of u′ for a compact graph, where u′ is a sum of delta
/// spikes at the eigenvalue k's. Requires σ ≥ 5/k_max.
LengthRecovery recover_length_spectrum(const SpectrumReport& spectrum, const RecoveryOptions& opt);

/// Noncompact version from the scattering phase: u′ = s′/π plus a delta
/// spike at each embedded eigenvalue, with the mean slope estimated from the
/// upper half of [0, k_max].
LengthRecovery recover_length_spectrum(const ScatteringPhase& phase, std::size_t zero_modes,
                                       const std::vector<Eigenvalue>& embedded, const RecoveryOptions& opt);

struct ZeroEntry {
  std::string vertex;
  std::size_t row = 0, col = 0;  // positions in the star
};

struct HypothesisReport {
  bool relation_search_done = false;  // skipped for more than 8 internal edges
  bool lengths_rationally_independent = false;
  std::vector<long long> relation;  // minimal L1 integer relation, if found
  double relation_residual = 0.0;
  int search_bound = 20;
  bool all_s_entries_nonzero = false;
  std::vector<ZeroEntry> zero_entries;
  std::vector<std::string> degree_two_standard;  // vertices where standard BC forces [𝔖]_jj = 0
  std::vector<std::string> notes;
};

HypothesisReport check_inverse_hypotheses(const MetricGraph& g, const BoundaryData& data);

/// Integer relation search Σ n_i a_i ≈ 0 with n ∈ [−bound, bound]^n \ {0}.
/// Returns the relation with least L1 norm (ties broken lexicographically),
/// normalized so the first nonzero entry is positive; empty if none.
std::vector<long long> find_integer_relation(const std::vector<double>& a, int bound, double tol);

}  // namespace qgraph

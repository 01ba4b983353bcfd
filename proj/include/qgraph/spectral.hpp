#pragma once

#include <cstddef>
#include <vector>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/linalg.hpp"

namespace qgraph {

/// det(I − 𝔖_II T_I(k)) on the internal slots. For compact graphs this is
/// the full secular determinant; positive eigenvalues are its real zeros.
cplx secular_value(const MetricGraph& g, const BoundaryData& data, double k);

struct Eigenvalue {
  double k = 0.0;
  double lambda = 0.0;
  std::size_t multiplicity = 1;
  double residual = 0.0;        // |secular_value(k)|
  std::size_t kernel_dim = 0;   // singular values of I − 𝔖T(k) below 1e-8
  bool candidate = false;       // embedded eigenvalue candidate on a noncompact graph
};

struct SpectrumReport {
  std::vector<Eigenvalue> eigenvalues;  // ascending; λ = 0 first when present
  std::vector<Eigenvalue> candidates;   // noncompact graphs only, not certified
  double k_max = 0.0;
  double tol = 0.0;
  bool compact = true;

  /// Σ multiplicities of certified eigenvalues ≤ λ.
  std::size_t count(double lambda) const;
};

/// Dimension of the space of affine functions satisfying the vertex
/// conditions (and vanishing on external edges): the multiplicity of λ = 0.
std::size_t zero_mode_multiplicity(const MetricGraph& g, const BoundaryData& data);

/// Eigenvalues with 0 ≤ k ≤ k_max located to |Δk| ≤ tol. Requires
/// k-independent data. On noncompact graphs only λ = 0 is certified; real
/// secular zeros whose kernel does not reach the external edges are returned
/// as candidates.
SpectrumReport eigenvalues(const MetricGraph& g, const BoundaryData& data, double k_max, double tol = 1e-10);

struct ScatteringMatrix {
  Matrix sigma;             // |E| × |E|
  double k_used = 0.0;      // differs from the request when shifted off a resonance
  bool shifted = false;
};

/// Σ(k) = 𝔖_EE + 𝔖_EI T_I (I − 𝔖_II T_I)⁻¹ 𝔖_IE. At an internal secular
/// zero the matrix is evaluated at k(1 + 1e-7) and `shifted` is set.
ScatteringMatrix scattering_matrix(const MetricGraph& g, const BoundaryData& data, double k);

/// Continuous branch of s(k) = (1/2i) log det Σ(k) for k ∈ (0, k_max],
/// fixed at k → 0+ by taking every eigenphase of Σ in (−3π/2, π/2].
/// Zero on compact graphs.
class ScatteringPhase {
 public:
  ScatteringPhase(const MetricGraph& g, const BoundaryData& data, double k_max);

  double operator()(double k) const;
  double at_zero() const { return s0_; }
  double k_max() const { return k_max_; }
  std::size_t num_nodes() const { return ks_.size(); }

 private:
  const MetricGraph* g_;
  const BoundaryData* data_;
  double k_max_;
  double s0_ = 0.0;
  std::vector<double> ks_, phis_;  // nodes of the unwrapped arg det Σ
};

struct ScatteringData {
  std::vector<double> lambda;
  std::vector<double> phase;            // s(λ)
  std::vector<double> counting;         // N(λ)
  std::vector<double> xi;               // −s/π − N
  std::vector<cplx> det_sigma;
  std::vector<double> unitarity_defect;
  std::vector<double> birman_krein_residual;  // |det Σ − e^{−2πiξ}|
  double phase_at_zero = 0.0;
  std::size_t zero_modes = 0;
  std::vector<Eigenvalue> candidates;
  double max_phase_jump = 0.0;  // largest |Δs| between adjacent grid points
};

/// Requires a strictly increasing positive grid and k-independent data.
ScatteringData spectral_shift(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& lambda_grid);

}  // namespace qgraph

#include "qgraph/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "qgraph/errors.hpp"

namespace qgraph {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kKernelTol = 1e-8;

using Index = Eigen::Index;

struct Blocks {
  Matrix EE, EI, IE, II;
};

Blocks split(const MetricGraph& g, const Matrix& S) {
  const auto ne = static_cast<Index>(g.num_external());
  const auto ni = static_cast<Index>(2 * g.num_internal());
  return {S.topLeftCorner(ne, ne), S.topRightCorner(ne, ni), S.bottomLeftCorner(ni, ne), S.bottomRightCorner(ni, ni)};
}

/// Internal slot lengths a_s (both ends of an edge share its length).
Eigen::VectorXd slot_lengths(const MetricGraph& g) {
  Eigen::VectorXd a(static_cast<Index>(2 * g.num_internal()));
  for (std::size_t i = 0; i < g.num_internal(); ++i) {
    a(static_cast<Index>(i)) = g.internal(i).length;
    a(static_cast<Index>(i + g.num_internal())) = g.internal(i).length;
  }
  return a;
}

/// T_I(k) on internal slots: initial ↔ terminal with factor e^{ika}.
Matrix internal_transfer(const MetricGraph& g, double k) {
  const auto ni = static_cast<Index>(g.num_internal());
  Matrix T = Matrix::Zero(2 * ni, 2 * ni);
  for (Index i = 0; i < ni; ++i) {
    const cplx f = std::exp(kI * k * g.internal(static_cast<std::size_t>(i)).length);
    T(i, i + ni) = f;
    T(i + ni, i) = f;
  }
  return T;
}

double principal_phase(cplx z) {
  double th = std::arg(z);
  if (th < 0.0) th += 2.0 * kPi;
  return th;
}

/// Eigenphase counting for compact graphs: U(k) = 𝔖 T(k) has eigenphases
/// that increase strictly in k, and their sum grows exactly like 2Lk.
class PhaseCounter {
 public:
  PhaseCounter(const MetricGraph& g, const Matrix& S) : S_(S), a_(slot_lengths(g)), two_L_(a_.sum()) {
    Eigen::ComplexEigenSolver<Matrix> es(S_ * internal_transfer(g, 0.0), false);
    for (Index j = 0; j < es.eigenvalues().size(); ++j) {
      double th = principal_phase(es.eigenvalues()(j));
      if (th < 1e-9 || th > 2.0 * kPi - 1e-9) th = 0.0;
      theta0_ += th;
    }
    P_ = internal_transfer(g, 0.0);
  }

  /// Number of eigenvalues (with multiplicity) with k' ∈ (0, k].
  long long count(double k) const {
    const Matrix U = S_ * P_ * Eigen::VectorXcd((kI * k * a_.cast<cplx>()).array().exp()).asDiagonal();
    Eigen::ComplexEigenSolver<Matrix> es(U, false);
    double sum = 0.0;
    for (Index j = 0; j < es.eigenvalues().size(); ++j) sum += principal_phase(es.eigenvalues()(j));
    return std::llround((theta0_ + two_L_ * k - sum) / (2.0 * kPi));
  }

 private:
  Matrix S_, P_;
  Eigen::VectorXd a_;
  double two_L_;
  double theta0_ = 0.0;
};

double smallest_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

std::size_t count_below(const Matrix& m, double tol) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  return static_cast<std::size_t>((sv.array() < tol).count());
}

double wrap(double x) { return std::remainder(x, 2.0 * kPi); }

/// Embedded-eigenvalue test matrix [I − 𝔖_II T; 𝔖_EI T] at real k.
Matrix embedded_system(const MetricGraph& g, const BoundaryData& data, double k) {
  const Blocks b = split(g, assemble_global_scattering(g, data, cplx{k, 0.0}).S);
  const Matrix T = internal_transfer(g, k);
  const auto ni = b.II.rows();
  Matrix m(ni + b.EI.rows(), ni);
  m << Matrix::Identity(ni, ni) - b.II * T, b.EI * T;
  return m;
}

}  // namespace

std::size_t SpectrumReport::count(double lambda) const {
  std::size_t n = 0;
  for (const auto& e : eigenvalues)
    if (e.lambda <= lambda) n += e.multiplicity;
  return n;
}

cplx secular_value(const MetricGraph& g, const BoundaryData& data, double k) {
  if (g.num_internal() == 0) throw validation_error("secular determinant needs at least one internal edge");
  const Blocks b = split(g, assemble_global_scattering(g, data, cplx{k, 0.0}).S);
  const auto ni = b.II.rows();
  return (Matrix::Identity(ni, ni) - b.II * internal_transfer(g, k)).determinant();
}

std::size_t zero_mode_multiplicity(const MetricGraph& g, const BoundaryData& data) {
  check_boundary(g, data);
  const std::size_t ni = g.num_internal();
  if (ni == 0) return 0;
  // unknowns: α_i (value at x = 0) and β_i (slope), ψ_i = α_i + β_i x
  Matrix M = Matrix::Zero(static_cast<Index>(g.num_slots()), static_cast<Index>(2 * ni));
  Index row = 0;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const auto& bc = data.vertices[v];
    const auto& star = g.star(v);
    for (Index r = 0; r < bc.A.rows(); ++r, ++row) {
      for (std::size_t l = 0; l < star.size(); ++l) {
        const std::size_t s = star[l];
        const cplx A = bc.A(r, static_cast<Index>(l)), B = bc.B(r, static_cast<Index>(l));
        const auto kind = g.slot_kind(s);
        if (kind == EndKind::External) continue;
        const auto i = static_cast<Index>(g.slot_edge_index(s));
        const auto alpha = i, beta = i + static_cast<Index>(ni);
        if (kind == EndKind::Initial) {
          M(row, alpha) += A;
          M(row, beta) += B;
        } else {
          M(row, alpha) += A;
          M(row, beta) += A * g.internal(static_cast<std::size_t>(i)).length - B;
        }
      }
    }
  }
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  std::size_t rank = 0;
  for (Index j = 0; j < sv.size(); ++j)
    if (sv(j) > 1e-10 * std::max(smax, 1e-300)) ++rank;
  return 2 * ni - rank;
}

SpectrumReport eigenvalues(const MetricGraph& g, const BoundaryData& data, double k_max, double tol) {
  check_boundary(g, data);
  if (!(k_max > 0.0) || !std::isfinite(k_max)) throw validation_error("k_max must be positive");
  if (!(tol > 0.0)) throw validation_error("tol must be positive");
  if (!data.k_independent())
    throw precondition_error("not-k-independent", "eigenvalue search requires k-independent boundary conditions");
  SpectrumReport rep;
  rep.k_max = k_max;
  rep.tol = tol;
  rep.compact = g.is_compact();

  if (const auto n0 = zero_mode_multiplicity(g, data); n0 > 0) rep.eigenvalues.push_back({0.0, 0.0, n0, 0.0, n0, false});
  if (g.num_internal() == 0) return rep;

  const double L = g.total_length();
  const double step = kPi / (8.0 * L);
  const std::size_t nsteps = static_cast<std::size_t>(std::ceil(k_max / step));

  if (rep.compact) {
    const Matrix S = k_independent_scattering(g, data);
    const PhaseCounter counter(g, S);
    std::vector<double> grid(nsteps + 1);
    std::vector<long long> counts(nsteps + 1);
    for (std::size_t j = 0; j <= nsteps; ++j) {
      grid[j] = std::min(k_max, step * static_cast<double>(j));
      counts[j] = j == 0 ? 0 : counter.count(grid[j]);
    }
    std::vector<double> roots;
    for (std::size_t j = 1; j <= nsteps; ++j) {
      for (long long level = counts[j - 1] + 1; level <= counts[j]; ++level) {
        double lo = grid[j - 1], hi = grid[j];
        while (hi - lo > tol) {
          const double mid = 0.5 * (lo + hi);
          (counter.count(mid) >= level ? hi : lo) = mid;
        }
        roots.push_back(0.5 * (lo + hi));
      }
    }
    std::sort(roots.begin(), roots.end());
    const double merge = std::max(10.0 * tol, 1e-12);
    for (std::size_t r = 0; r < roots.size();) {
      std::size_t e = r + 1;
      double sum = roots[r];
      while (e < roots.size() && roots[e] - roots[e - 1] <= merge) sum += roots[e++];
      const double k = sum / static_cast<double>(e - r);
      if (k > 0.0) {
        Eigenvalue ev;
        ev.k = k;
        ev.lambda = k * k;
        ev.multiplicity = e - r;
        const auto ni = S.rows();
        const Matrix M = Matrix::Identity(ni, ni) - S * internal_transfer(g, k);
        ev.residual = std::abs(M.determinant());
        ev.kernel_dim = count_below(M, kKernelTol);
        rep.eigenvalues.push_back(ev);
      }
      r = e;
    }
    return rep;
  }

  // noncompact: embedded eigenvalue candidates from minima of σ_min
  const double h = step / 4.0;
  const std::size_t n = static_cast<std::size_t>(std::ceil(k_max / h));
  std::vector<double> f(n + 1);
  for (std::size_t j = 1; j <= n; ++j) f[j] = smallest_singular_value(embedded_system(g, data, h * double(j)));
  f[0] = f.size() > 1 ? f[1] + 1.0 : 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    if (!(f[j] <= f[j - 1] && f[j] <= f[j + 1]) || f[j] > 0.25) continue;
    double lo = h * double(j - 1), hi = h * double(j + 1);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto fk = [&](double k) { return smallest_singular_value(embedded_system(g, data, k)); };
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = fk(x1), f2 = fk(x2);
    while (hi - lo > tol) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = fk(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = fk(x2);
      }
    }
    const double k = 0.5 * (lo + hi);
    if (k < 0.5 * h) continue;  // k → 0 degenerates; zero modes are counted separately
    const Matrix m = embedded_system(g, data, k);
    if (smallest_singular_value(m) < kKernelTol) {
      Eigenvalue ev;
      ev.k = k;
      ev.lambda = k * k;
      ev.kernel_dim = count_below(m, kKernelTol);
      ev.multiplicity = std::max<std::size_t>(1, ev.kernel_dim);
      ev.residual = std::abs(secular_value(g, data, k));
      ev.candidate = true;
      if (rep.candidates.empty() || k - rep.candidates.back().k > 10.0 * tol) rep.candidates.push_back(ev);
    }
  }
  return rep;
}

ScatteringMatrix scattering_matrix(const MetricGraph& g, const BoundaryData& data, double k) {
  check_boundary(g, data);
  if (g.num_external() == 0) throw validation_error("scattering matrix needs at least one external edge");
  if (!(k > 0.0) || !std::isfinite(k)) throw validation_error("k must be positive");
  ScatteringMatrix out;
  out.k_used = k;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Blocks b = split(g, assemble_global_scattering(g, data, cplx{out.k_used, 0.0}).S);
    if (g.num_internal() == 0) {
      out.sigma = b.EE;
      return out;
    }
    const Matrix T = internal_transfer(g, out.k_used);
    const auto ni = b.II.rows();
    const Matrix M = Matrix::Identity(ni, ni) - b.II * T;
    if (attempt == 0 && smallest_singular_value(M) < 1e-10) {
      out.k_used = k * (1.0 + 1e-7);
      out.shifted = true;
      continue;
    }
    out.sigma = b.EE + b.EI * T * M.fullPivLu().solve(b.IE);
    return out;
  }
  return out;
}

ScatteringPhase::ScatteringPhase(const MetricGraph& g, const BoundaryData& data, double k_max)
    : g_(&g), data_(&data), k_max_(k_max) {
  if (g.is_compact()) return;
  const double scale = std::max({1.0, g.total_length(), g.max_length()});
  const double k0 = 1e-9 / scale;
  const Matrix sigma0 = scattering_matrix(g, data, k0).sigma;
  Eigen::ComplexEigenSolver<Matrix> es(sigma0, false);
  double phi = 0.0;
  for (Index j = 0; j < es.eigenvalues().size(); ++j) {
    double th = std::arg(es.eigenvalues()(j));
    if (th > kPi / 2.0) th -= 2.0 * kPi;
    phi += th;
  }
  s0_ = phi / 2.0;

  auto det_dir = [&](double k) {
    const cplx d = scattering_matrix(g, data, k).sigma.determinant();
    return d / std::abs(d);
  };
  const double h0 = std::min(0.02, kPi / (32.0 * scale));
  double k = k0, h = h0;
  cplx d = det_dir(k);
  phi = wrap(std::arg(d) - phi) + phi;  // align the branch with the eigenphase sum
  ks_.push_back(k);
  phis_.push_back(phi);
  while (k < k_max) {
    const double kn = std::min(k_max, k + h);
    const cplx dn = det_dir(kn);
    const double delta = std::arg(dn / d);
    if (std::abs(delta) > kPi / 4.0) {
      h /= 2.0;
      if (h < 1e-12)
        throw numeric_error("unwrap-ambiguous", "scattering phase jumps too fast near k = " + std::to_string(k));
      continue;
    }
    k = kn;
    d = dn;
    phi += delta;
    ks_.push_back(k);
    phis_.push_back(phi);
    h = std::min(h0, 1.5 * h);
  }
}

double ScatteringPhase::operator()(double k) const {
  if (g_->is_compact()) return 0.0;
  if (!(k > 0.0) || k > k_max_ * (1.0 + 1e-12))
    throw validation_error("scattering phase requested outside (0, k_max]");
  auto it = std::upper_bound(ks_.begin(), ks_.end(), k);
  double ref;
  if (it == ks_.begin()) {
    ref = phis_.front();
  } else if (it == ks_.end()) {
    ref = phis_.back();
  } else {
    const std::size_t j = static_cast<std::size_t>(it - ks_.begin());
    const double w = (k - ks_[j - 1]) / (ks_[j] - ks_[j - 1]);
    ref = (1.0 - w) * phis_[j - 1] + w * phis_[j];
  }
  const cplx d = scattering_matrix(*g_, *data_, k).sigma.determinant();
  const double phi = ref + wrap(std::arg(d) - ref);
  return phi / 2.0;
}

ScatteringData spectral_shift(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& lambda_grid) {
  check_boundary(g, data);
  if (lambda_grid.empty()) throw validation_error("empty lambda grid");
  for (std::size_t j = 0; j < lambda_grid.size(); ++j) {
    if (!(lambda_grid[j] > 0.0) || !std::isfinite(lambda_grid[j]))
      throw validation_error("lambda grid must be positive");
    if (j && !(lambda_grid[j] > lambda_grid[j - 1])) throw validation_error("lambda grid must be strictly increasing");
  }
  if (!data.k_independent())
    throw precondition_error("not-k-independent", "spectral shift requires k-independent boundary conditions");

  ScatteringData out;
  const double k_top = std::sqrt(lambda_grid.back());
  const SpectrumReport spec = eigenvalues(g, data, k_top * (1.0 + 1e-9) + 1e-9, 1e-11);
  out.zero_modes = zero_mode_multiplicity(g, data);
  out.candidates = spec.candidates;
  std::optional<ScatteringPhase> phase;
  if (!g.is_compact()) {
    phase.emplace(g, data, k_top);
    out.phase_at_zero = phase->at_zero();
  }
  for (double lam : lambda_grid) {
    const double k = std::sqrt(lam);
    const double s = phase ? (*phase)(k) : 0.0;
    const double N = static_cast<double>(spec.count(lam));
    const double xi = -s / kPi - N;
    cplx det{1.0, 0.0};
    double defect = 0.0;
    if (!g.is_compact()) {
      const Matrix sigma = scattering_matrix(g, data, k).sigma;
      det = sigma.determinant();
      defect = unitarity_defect(sigma);
    }
    out.lambda.push_back(lam);
    out.phase.push_back(s);
    out.counting.push_back(N);
    out.xi.push_back(xi);
    out.det_sigma.push_back(det);
    out.unitarity_defect.push_back(defect);
    out.birman_krein_residual.push_back(std::abs(det - std::exp(-2.0 * kPi * kI * xi)));
    if (out.phase.size() > 1)
      out.max_phase_jump = std::max(out.max_phase_jump, std::abs(out.phase.back() - out.phase[out.phase.size() - 2]));
  }
  return out;
}

}  // namespace qgraph

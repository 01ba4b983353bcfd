#include "qgraph/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qgraph/errors.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/walks.hpp"

namespace qgraph {

namespace {

constexpr double kPi = std::numbers::pi;

void check_t_grid(const std::vector<double>& t, double eps) {
  if (t.empty()) throw validation_error("empty t grid");
  for (double x : t)
    if (!(x > 0.0) || !std::isfinite(x)) throw validation_error("t must be positive");
  if (!(eps > 0.0)) throw validation_error("eps must be positive");
}

/// Max row sum of |𝔖| over internal rows and columns.
double internal_row_norm(const MetricGraph& g, const Matrix& S) {
  const auto ni = static_cast<Eigen::Index>(2 * g.num_internal());
  if (ni == 0) return 0.0;
  return S.bottomRightCorner(ni, ni).cwiseAbs().rowwise().sum().maxCoeff();
}

double external_term(const MetricGraph& g, CompareSign sign) {
  const double e = static_cast<double>(g.num_external()) / 4.0;
  return sign == CompareSign::Neumann ? -e : e;
}

}  // namespace

const char* to_string(CompareSign s) { return s == CompareSign::Neumann ? "neumann" : "dirichlet"; }

CompareSign compare_sign_from_string(const std::string& s) {
  if (s == "neumann" || s == "+") return CompareSign::Neumann;
  if (s == "dirichlet" || s == "-") return CompareSign::Dirichlet;
  throw validation_error("comparison must be 'neumann' or 'dirichlet'");
}

double cycle_tail_bound(const MetricGraph& g, const Matrix& S, double t, double cutoff) {
  if (g.num_internal() == 0) return 0.0;
  const double dim = static_cast<double>(2 * g.num_internal());
  const double R = std::max(internal_row_norm(g, S), 1e-300);
  const double amin = g.min_length(), amax = g.max_length();
  const double peak = std::sqrt(2.0 * t);
  // h(ℓ) = ℓ e^{−ℓ²/4t} is maximal at √(2t) and decreasing beyond it
  auto log_h = [&](double l) {
    l = std::max(l, peak);
    return std::log(l) - l * l / (4.0 * t);
  };
  const double pref = std::log(dim) - std::log(2.0 * std::sqrt(kPi * t));
  auto log_term = [&](double m) { return pref + m * std::log(R) + log_h(std::max(cutoff, m * amin)); };

  double m = std::max(2.0, std::floor(cutoff / amax) + 1.0);
  double sum = 0.0;
  for (;; m += 1.0) {
    const double lt = log_term(m);
    const double term = std::exp(lt);
    sum += term;
    if (m * amin > std::max(cutoff, peak)) {
      const double ratio = std::exp(log_term(m + 1.0) - lt);
      if (ratio < 0.5) return sum + term * ratio / (1.0 - ratio);
    }
    if (m > 1e7) return std::numeric_limits<double>::infinity();
  }
}

double cycle_cutoff(const MetricGraph& g, const Matrix& S, double t, double eps) {
  if (g.num_internal() == 0) return 0.0;
  double hi = 2.0 * g.min_length();
  while (cycle_tail_bound(g, S, t, hi) > eps) {
    hi *= 1.5;
    if (hi > 1e6) throw numeric_error("cutoff-overflow", "no finite cycle cutoff reaches the requested eps");
  }
  double lo = hi / 1.5;
  if (lo < 2.0 * g.min_length()) return hi;
  while (hi - lo > 0.01 * lo) {
    const double mid = 0.5 * (lo + hi);
    (cycle_tail_bound(g, S, t, mid) > eps ? lo : hi) = mid;
  }
  return hi;
}

CycleTrace heat_trace_cycles(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& t, double eps,
                             CompareSign sign, unsigned threads) {
  check_t_grid(t, eps);
  require_tadpole_free(g, "heat_trace_cycles");
  check_boundary(g, data);
  const Matrix S = k_independent_scattering(g, data);
  CycleTrace out;
  out.t = t;
  out.constant = S.trace().real() / 4.0 + external_term(g, sign);
  const double L = g.total_length();

  double cutoff = 0.0;
  for (double tt : t) cutoff = std::max(cutoff, cycle_cutoff(g, S, tt, eps));
  out.cutoff_length = cutoff;

  const std::size_t nt = t.size();
  std::vector<std::vector<cplx>> acc(num_cycle_roots(g), std::vector<cplx>(nt));
  std::vector<double> inv4t(nt);
  for (std::size_t j = 0; j < nt; ++j) inv4t[j] = 1.0 / (4.0 * t[j]);
  if (g.num_internal() > 0) {
    out.cycles_used = visit_cycles(
        g, S, cutoff,
        [&](std::size_t root, const CycleView& c) {
          const double prim_len = c.length / static_cast<double>(c.power);
          auto& a = acc[root];
          for (std::size_t j = 0; j < nt; ++j) {
            const double expo = -c.length * c.length * inv4t[j];
            if (expo > -745.0) a[j] += c.weight * (prim_len * std::exp(expo));
          }
        },
        threads);
  }
  for (std::size_t j = 0; j < nt; ++j) {
    cplx sum{};
    for (const auto& a : acc) sum += a[j];
    const double pref = 1.0 / (2.0 * std::sqrt(kPi * t[j]));
    out.weyl.push_back(L * pref);
    out.cycle_sum.push_back(pref * sum);
    out.value.push_back(L * pref + out.constant + pref * sum);
    out.tail_bound.push_back(g.num_internal() ? cycle_tail_bound(g, S, t[j], cutoff) : 0.0);
  }
  return out;
}

SpectralTrace heat_trace_spectral(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& t,
                                  double eps, CompareSign sign) {
  check_t_grid(t, eps);
  check_boundary(g, data);
  if (!data.k_independent())
    throw precondition_error("not-k-independent", "the spectral side requires k-independent boundary conditions");
  SpectralTrace out;
  out.t = t;
  const double tmin = *std::min_element(t.begin(), t.end());

  if (g.is_compact()) {
    // U(k) has 2|I| eigenphases, each rising by at most a_max·Δk, so a
    // k-window of width 2π/a_max holds at most 2|I| eigenvalues.
    const double ni = static_cast<double>(std::max<std::size_t>(g.num_internal(), 1));
    const double width = g.num_internal() ? 2.0 * kPi / g.max_length() : 1.0;
    auto tail = [&](double K, double tt) {
      double sum = 0.0;
      for (double m = 0.0;; m += 1.0) {
        const double kb = K + m * width;
        const double term = 4.0 * ni * std::exp(-tt * kb * kb);
        sum += term;
        if (term < 1e-3 * sum || term == 0.0) return sum * 1.01 + term;
      }
    };
    double K = 1.0;
    while (tail(K, tmin) > eps / 10.0) K *= 1.2;
    out.k_max = K;
    const SpectrumReport spec = g.num_internal() ? eigenvalues(g, data, K, 1e-12) : SpectrumReport{};
    for (double tt : t) {
      double v = 0.0;
      for (auto it = spec.eigenvalues.rbegin(); it != spec.eigenvalues.rend(); ++it)
        v += static_cast<double>(it->multiplicity) * std::exp(-tt * it->lambda);
      if (g.num_internal() == 0) v = 0.0;
      out.value.push_back(v);
      out.error_bound.push_back(tail(K, tt));
    }
    return out;
  }

  // noncompact: N0 + (t/π)∫ s(k) 2k e^{−tk²} dk, with |s(k)| ≲ |s(0+)| + 2Lk + π·dim K
  const double L = g.total_length();
  const double dimK = static_cast<double>(g.num_slots());
  auto tail = [&](double K, double tt, double s0) {
    const double A = std::abs(s0) + kPi * dimK, B = 2.0 * L + 1.0;
    const double e = std::exp(-tt * K * K);
    return (A * e + B * (K * e + std::sqrt(kPi) / (2.0 * std::sqrt(tt)) * std::erfc(std::sqrt(tt) * K))) / kPi;
  };
  const std::size_t n0 = zero_mode_multiplicity(g, data);
  double K = 1.0;
  {
    const ScatteringPhase probe(g, data, 1e-6);
    while (tail(K, tmin, probe.at_zero()) > eps / 10.0) K *= 1.2;
  }
  out.k_max = K;
  const ScatteringPhase phase(g, data, K);
  // embedded eigenvalues are invisible to the scattering phase
  const SpectrumReport embedded = g.num_internal() ? eigenvalues(g, data, K, 1e-12) : SpectrumReport{};
  const double piece = std::min(1.0, kPi / (2.0 * std::max(L, 1e-3)));
  const std::size_t npieces = static_cast<std::size_t>(std::ceil(K / piece));
  for (double tt : t) {
    double integral = 0.0, err = 0.0;
    for (std::size_t p = 0; p < npieces; ++p) {
      const double a = K * double(p) / double(npieces), b = K * double(p + 1) / double(npieces);
      double e = 0.0;
      integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double k) { return phase(k) * 2.0 * k * std::exp(-tt * k * k); }, a, b, 12, 1e-14, &e);
      err += e;
    }
    double v = static_cast<double>(n0) + tt / kPi * integral;
    for (const auto& e : embedded.candidates) v += static_cast<double>(e.multiplicity) * std::exp(-tt * e.lambda);
    if (sign == CompareSign::Dirichlet) v += static_cast<double>(g.num_external()) / 2.0;
    out.value.push_back(v);
    out.error_bound.push_back(tt / kPi * err + tail(K, tt, phase.at_zero()));
  }
  return out;
}

TraceReport compare_traces(const MetricGraph& g, const BoundaryData& data, const std::vector<double>& t, double eps,
                           CompareSign sign, unsigned threads) {
  TraceReport rep;
  rep.sign = sign;
  rep.eps = eps;
  rep.cycles = heat_trace_cycles(g, data, t, eps, sign, threads);
  rep.spectral = heat_trace_spectral(g, data, t, eps, sign);
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double d = std::abs(rep.cycles.value[j] - rep.spectral.value[j]);
    rep.abs_discrepancy.push_back(d);
    rep.rel_discrepancy.push_back(d / std::max(std::abs(rep.spectral.value[j]), 1e-300));
    rep.failed.push_back(d > 10.0 * eps);
    rep.ok = rep.ok && !rep.failed.back();
  }
  return rep;
}

}  // namespace qgraph

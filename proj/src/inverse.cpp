#include "qgraph/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qgraph/errors.hpp"
#include "qgraph/walks.hpp"

namespace qgraph {

namespace {

constexpr double kPi = std::numbers::pi;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

double resolve_sigma(const RecoveryOptions& opt, double k_max) {
  if (!(opt.omega_max > 0.0)) throw validation_error("omega_max must be positive");
  if (!(k_max > 0.0)) throw precondition_error("insufficient-k-range", "no spectral data above k = 0");
  const double sigma = opt.sigma > 0.0 ? opt.sigma : 5.0 / k_max;
  if (k_max * sigma < 5.0 * (1.0 - 1e-12))
    throw precondition_error("insufficient-k-range", "sigma = " + std::to_string(sigma) + " needs k_max >= " +
                                                         std::to_string(5.0 / sigma));
  return sigma;
}

std::vector<double> omega_grid(double omega_max, double sigma) {
  const double h = sigma / 8.0;
  const auto n = static_cast<std::size_t>(std::ceil(omega_max / h));
  std::vector<double> w(n + 1);
  for (std::size_t j = 0; j <= n; ++j) w[j] = h * double(j);
  return w;
}

/// Background, noise floor and interpolated peaks of F on ω ≥ 6σ.
void find_peaks(LengthRecovery& r, double rel_floor) {
  const double K = 1.0 / r.sigma;
  const double h = r.sigma / 8.0;
  const auto first = static_cast<std::size_t>(std::ceil(6.0 * r.sigma / h));
  if (first + 2 >= r.omega.size()) return;
  std::vector<double> tail(r.transform.begin() + static_cast<std::ptrdiff_t>(first), r.transform.end());
  r.background = median(tail);
  std::vector<double> dev(tail.size());
  double top = 0.0;
  for (std::size_t j = 0; j < tail.size(); ++j) {
    dev[j] = std::abs(tail[j] - r.background);
    top = std::max(top, dev[j]);
  }
  r.floor = std::max(rel_floor * top, 6.0 * median(dev));
  auto y = [&](std::size_t j) { return std::abs(r.transform[j] - r.background); };
  for (std::size_t j = std::max<std::size_t>(first, 1); j + 1 < r.omega.size(); ++j) {
    const double y0 = y(j), ym = y(j - 1), yp = y(j + 1);
    if (!(y0 > ym && y0 >= yp) || y0 < r.floor) continue;
    const double den = ym - 2.0 * y0 + yp;
    const double d = den != 0.0 ? 0.5 * (ym - yp) / den : 0.0;
    const double height = y0 - 0.25 * (ym - yp) * d;
    const double sign = r.transform[j] >= r.background ? 1.0 : -1.0;
    r.peaks.push_back({r.omega[j] + d * h, sign * height * std::sqrt(2.0 * kPi) / K, height});
  }
}

}  // namespace

std::vector<LengthGroup> reduced_length_spectrum(const MetricGraph& g, const BoundaryData& data, double lambda,
                                                 unsigned threads) {
  require_tadpole_free(g, "reduced_length_spectrum");
  if (g.num_internal() == 0) throw precondition_error("no-internal-edges", "the graph has no cycles");
  std::vector<LengthGroup> groups;
  for (const Cycle& c : enumerate_cycles(g, data, lambda, threads)) {
    const cplx term = c.weight * (c.length / static_cast<double>(c.power));
    const std::size_t counted = c.zero_weight() ? 0 : 1;
    if (!groups.empty() && c.length - groups.back().length <= 1e-9) {
      groups.back().amplitude += term;
      groups.back().cycles += counted;
    } else {
      groups.push_back({c.length, term, counted});
    }
  }
  std::erase_if(groups, [](const LengthGroup& x) { return std::abs(x.amplitude) < 1e-12; });
  return groups;
}

LengthRecovery recover_length_spectrum(const SpectrumReport& spectrum, const RecoveryOptions& opt) {
  if (!spectrum.compact) throw precondition_error("noncompact", "use the scattering-phase recovery on noncompact graphs");
  LengthRecovery r;
  r.k_max = spectrum.k_max;
  r.sigma = resolve_sigma(opt, r.k_max);
  const double K = 1.0 / r.sigma;
  double n0 = 0.0;
  std::vector<std::pair<double, double>> spikes;  // (k, mult · taper)
  for (const auto& e : spectrum.eigenvalues) {
    if (e.k == 0.0) {
      n0 += static_cast<double>(e.multiplicity);
    } else {
      spikes.emplace_back(e.k, static_cast<double>(e.multiplicity) * std::exp(-e.k * e.k / (2.0 * K * K)));
    }
  }
  r.jump_at_zero = 2.0 * n0;
  r.omega = omega_grid(opt.omega_max, r.sigma);
  r.transform.resize(r.omega.size());
  for (std::size_t j = 0; j < r.omega.size(); ++j) {
    double f = r.jump_at_zero;
    for (auto [k, m] : spikes) f += 2.0 * m * std::cos(r.omega[j] * k);
    r.transform[j] = f;
  }
  find_peaks(r, opt.rel_floor);
  return r;
}

LengthRecovery recover_length_spectrum(const ScatteringPhase& phase, std::size_t zero_modes,
                                       const std::vector<Eigenvalue>& embedded, const RecoveryOptions& opt) {
  LengthRecovery r;
  r.k_max = phase.k_max();
  r.sigma = resolve_sigma(opt, r.k_max);
  const double K = 1.0 / r.sigma;
  const auto n = static_cast<std::size_t>(std::ceil(r.k_max / 0.005));
  const double h = r.k_max / double(n);
  std::vector<double> s(n + 1);
  s[0] = phase.at_zero();
  for (std::size_t j = 1; j <= n; ++j) s[j] = phase(h * double(j));
  const std::size_t half = n / 2;
  double upper = 0.0;
  std::vector<std::pair<double, double>> spikes;  // (k, mult · taper)
  for (const auto& e : embedded) {
    if (!(e.k > 0.0) || e.k > r.k_max) continue;
    const double m = static_cast<double>(e.multiplicity);
    spikes.emplace_back(e.k, m * std::exp(-e.k * e.k / (2.0 * K * K)));
    if (e.k > h * double(half)) upper += m;
  }
  r.length_estimate = (s[n] - s[half] + kPi * upper) / (h * double(n - half));
  r.jump_at_zero = 2.0 * (s[0] / kPi + static_cast<double>(zero_modes));

  // (u′ − L/π)·taper on the grid, trapezoid weights folded in
  std::vector<double> k(n), f(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double du = j == 0 ? (s[1] - s[0]) / h : (s[j + 1] - s[j - 1]) / (2.0 * h);
    k[j] = h * double(j);
    f[j] = (j == 0 ? 0.5 : 1.0) * h * std::exp(-k[j] * k[j] / (2.0 * K * K)) * (du - r.length_estimate) / kPi;
  }
  r.omega = omega_grid(opt.omega_max, r.sigma);
  r.transform.resize(r.omega.size());
  for (std::size_t i = 0; i < r.omega.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += std::cos(r.omega[i] * k[j]) * f[j];
    for (auto [kn, m] : spikes) acc += m * std::cos(r.omega[i] * kn);
    r.transform[i] = r.jump_at_zero + 2.0 * acc;
  }
  find_peaks(r, opt.rel_floor);
  return r;
}

std::vector<long long> find_integer_relation(const std::vector<double>& a, int bound, double tol) {
  const std::size_t n = a.size();
  if (n == 0 || bound < 1) return {};
  const long long base = 2LL * bound + 1;
  const std::size_t h1 = n / 2, h2 = n - h1;
  auto decode = [&](long long idx, std::size_t len, long long* out) {
    for (std::size_t i = 0; i < len; ++i) {
      out[i] = idx % base - bound;
      idx /= base;
    }
  };
  long long count1 = 1, count2 = 1;
  for (std::size_t i = 0; i < h1; ++i) count1 *= base;
  for (std::size_t i = 0; i < h2; ++i) count2 *= base;

  std::vector<std::pair<double, long long>> left(static_cast<std::size_t>(count1));
  std::vector<long long> digits(n);
  for (long long idx = 0; idx < count1; ++idx) {
    decode(idx, h1, digits.data());
    double v = 0.0;
    for (std::size_t i = 0; i < h1; ++i) v += double(digits[i]) * a[i];
    left[static_cast<std::size_t>(idx)] = {v, idx};
  }
  std::sort(left.begin(), left.end());

  std::vector<long long> best;
  long long best_l1 = 0;
  for (long long idx = 0; idx < count2; ++idx) {
    decode(idx, h2, digits.data() + h1);
    double v = 0.0;
    for (std::size_t i = 0; i < h2; ++i) v += double(digits[h1 + i]) * a[h1 + i];
    auto it = std::lower_bound(left.begin(), left.end(), std::make_pair(-v - tol, -1LL));
    for (; it != left.end() && it->first <= -v + tol; ++it) {
      decode(it->second, h1, digits.data());
      long long l1 = 0;
      for (auto d : digits) l1 += std::llabs(d);
      if (l1 == 0) continue;
      std::vector<long long> cand = digits;
      const auto nz = std::find_if(cand.begin(), cand.end(), [](long long d) { return d != 0; });
      if (*nz < 0)
        for (auto& d : cand) d = -d;
      if (best.empty() || l1 < best_l1 || (l1 == best_l1 && cand < best)) {
        best = std::move(cand);
        best_l1 = l1;
      }
    }
  }
  return best;
}

HypothesisReport check_inverse_hypotheses(const MetricGraph& g, const BoundaryData& data) {
  check_boundary(g, data);
  HypothesisReport rep;
  std::vector<double> a;
  for (const auto& e : g.internal_edges()) a.push_back(e.length);
  if (a.size() > 8) {
    rep.notes.push_back("integer relation search skipped: more than 8 internal edges");
  } else {
    rep.relation_search_done = true;
    double amax = 1.0;
    for (double x : a) amax = std::max(amax, x);
    rep.relation = find_integer_relation(a, rep.search_bound, 1e-9 * amax);
    rep.lengths_rationally_independent = rep.relation.empty();
    if (rep.relation.empty()) {
      rep.notes.push_back("no integer relation with entries in [-20, 20] found; this is not a proof of independence");
    } else {
      double res = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) res += double(rep.relation[i]) * a[i];
      rep.relation_residual = std::abs(res);
    }
  }

  if (!data.k_independent()) rep.notes.push_back("vertex scattering matrices evaluated at k = 1");
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    const auto& bc = data.vertices[v];
    const Matrix S = vertex_scattering(bc, cplx{1.0, 0.0});
    for (Eigen::Index i = 0; i < S.rows(); ++i)
      for (Eigen::Index j = 0; j < S.cols(); ++j)
        if (std::abs(S(i, j)) < 1e-12)
          rep.zero_entries.push_back({g.vertices()[v], static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
    if (bc.preset == Preset::Standard && g.degree(v) == 2) rep.degree_two_standard.push_back(g.vertices()[v]);
  }
  rep.all_s_entries_nonzero = rep.zero_entries.empty();
  if (!rep.degree_two_standard.empty())
    rep.notes.push_back("standard conditions at a degree-2 vertex give [S]_jj = 0, so deg(v) != 2 is necessary");
  return rep;
}

}  // namespace qgraph

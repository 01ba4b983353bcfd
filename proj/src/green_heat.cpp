#include "qgraph/green_heat.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qgraph/errors.hpp"
#include "qgraph/walks.hpp"

namespace qgraph {

namespace {

/// Coefficient vector u with u[s] = e^{ik·dist(p, vertex of s)} on the slots
/// of p's edge and zero elsewhere.
Vector point_vector(const MetricGraph& g, const EdgePoint& p, cplx k) {
  Vector u = Vector::Zero(static_cast<Eigen::Index>(g.num_slots()));
  for (auto s : g.slots_of(p.edge)) {
    const double d = g.slot_kind(s) == EndKind::Terminal ? g.internal(p.edge.index).length - p.x : p.x;
    u(static_cast<Eigen::Index>(s)) = std::exp(kI * k * d);
  }
  return u;
}

double slot_dist(const MetricGraph& g, const EdgePoint& p, std::size_t slot) {
  return g.slot_kind(slot) == EndKind::Terminal ? g.internal(p.edge.index).length - p.x : p.x;
}

/// T(k): slot s ↦ partner(s) with factor e^{ik a}.
Matrix transfer(const MetricGraph& g, cplx k) {
  const auto n = static_cast<Eigen::Index>(g.num_slots());
  Matrix T = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < g.num_slots(); ++s) {
    if (auto p = g.partner(s))
      T(static_cast<Eigen::Index>(*p), static_cast<Eigen::Index>(s)) =
          std::exp(kI * k * g.internal(g.slot_edge_index(s)).length);
  }
  return T;
}

cplx free_term(const EdgePoint& x, const EdgePoint& y, cplx k) {
  if (x.edge != y.edge) return {};
  return kI * std::exp(kI * k * std::abs(x.x - y.x)) / (2.0 * k);
}

void require_upper_half_plane(cplx k) {
  if (!(k.imag() > 0.0) || !std::isfinite(k.real()))
    throw validation_error("the Green's function needs Im k > 0");
}

}  // namespace

EdgePoint make_point(const MetricGraph& g, const std::string& edge_id, double x) {
  const EdgeRef e = g.edge(edge_id);
  const double a = g.edge_length(e);
  if (!std::isfinite(x) || x < 0.0 || x > a)
    throw validation_error("coordinate " + std::to_string(x) + " outside edge '" + edge_id + "'");
  return {e, x};
}

double gaussian_kernel(double t, double u) {
  const double expo = -u * u / (4.0 * t);
  if (expo < -700.0) return 0.0;
  return std::exp(expo) / std::sqrt(4.0 * std::numbers::pi * t);
}

cplx green_closed(const MetricGraph& g, const BoundaryData& data, cplx k, const EdgePoint& x, const EdgePoint& y) {
  require_upper_half_plane(k);
  const Matrix S = assemble_global_scattering(g, data, k).S;
  const Vector ux = point_vector(g, x, k), uy = point_vector(g, y, k);
  const auto n = static_cast<Eigen::Index>(g.num_slots());
  const Matrix M = Matrix::Identity(n, n) - S * transfer(g, k);
  Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) throw numeric_error("singular-matrix", "I - S T(k) is singular");
  const Vector v = lu.solve(S * uy);
  return free_term(x, y, k) + kI / (2.0 * k) * (ux.array() * v.array()).sum();
}

SeriesResult green_series(const MetricGraph& g, const BoundaryData& data, cplx k, const EdgePoint& x,
                          const EdgePoint& y, double eps, std::size_t max_terms) {
  require_upper_half_plane(k);
  require_tadpole_free(g, "green_series");
  if (!(eps > 0.0)) throw validation_error("eps must be positive");
  const Matrix S = k_independent_scattering(g, data);
  const Matrix T = transfer(g, k);
  const Vector ux = point_vector(g, x, k), uy = point_vector(g, y, k);
  const double pref = 1.0 / (2.0 * std::abs(k));
  const double q = g.num_internal() ? std::exp(-k.imag() * g.min_length()) : 0.0;

  // ‖S(TS)^n‖ ≤ q^n, so the remainder after N terms is ≤ pref·‖ux‖‖uy‖·q^{N+1}/(1−q).
  const double scale = pref * ux.norm() * uy.norm();
  auto tail = [&](std::size_t N) { return q == 0.0 ? 0.0 : scale * std::pow(q, double(N + 1)) / (1.0 - q); };
  std::size_t N = 0;
  while (tail(N) > eps) {
    if (++N > max_terms)
      throw numeric_error("cutoff-overflow", "green series needs more than " + std::to_string(max_terms) + " terms");
  }

  // Walk counts use the sparsity pattern of S.
  const auto dim = static_cast<Eigen::Index>(g.num_slots());
  RealMatrix P = RealMatrix::Zero(dim, dim), T0 = RealMatrix::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) {
      P(r, c) = S(r, c) != cplx{} ? 1.0 : 0.0;
      T0(r, c) = T(r, c) != cplx{} ? 1.0 : 0.0;
    }
  Eigen::VectorXd cy = Eigen::VectorXd::Zero(dim), cx = Eigen::VectorXd::Zero(dim);
  for (auto s : g.slots_of(y.edge)) cy(static_cast<Eigen::Index>(s)) = 1.0;
  for (auto s : g.slots_of(x.edge)) cx(static_cast<Eigen::Index>(s)) = 1.0;

  SeriesResult res;
  Vector v = S * uy;
  Eigen::VectorXd c = P * cy;
  cplx sum{};
  for (std::size_t n = 0; n <= N; ++n) {
    sum += (ux.array() * v.array()).sum();
    res.walks_used += cx.dot(c);
    if (n == N) break;
    v = S * (T * v);
    c = P * (T0 * c);
  }
  res.value = free_term(x, y, k) + kI / (2.0 * k) * sum;
  res.comb_cutoff = N;
  res.tail_bound = tail(N);
  res.cutoff_length = g.num_internal() ? double(N + 1) * g.min_length() : std::numeric_limits<double>::infinity();
  return res;
}

std::pair<std::size_t, double> heat_series_cutoff(const MetricGraph& g, const Matrix& S, double t, double eps) {
  if (g.num_internal() == 0) return {0, 0.0};
  const double R = S.cwiseAbs().rowwise().sum().maxCoeff();
  const double a = g.min_length();
  // term_n = 4 R^{n+1} g_t(n a_min); ratio_n = term_{n+1}/term_n decreases in n.
  auto log_term = [&](double n) {
    return std::log(4.0) + (n + 1.0) * std::log(R) - n * n * a * a / (4.0 * t) - 0.5 * std::log(4.0 * std::numbers::pi * t);
  };
  auto tail = [&](std::size_t N) {
    double sum = 0.0;
    for (double n = double(N) + 1.0; n < 1e7; n += 1.0) {
      const double term = std::exp(log_term(n));
      const double ratio = std::exp(log_term(n + 1.0) - log_term(n));
      sum += term;
      if (ratio < 0.5) return sum + term * ratio / (1.0 - ratio);
    }
    return std::numeric_limits<double>::infinity();
  };
  // the bound is decreasing in N: double, then bisect
  constexpr std::size_t kMaxComb = 100'000;
  std::size_t hi = 1;
  while (tail(hi) > eps) {
    hi *= 2;
    if (hi > kMaxComb) throw numeric_error("cutoff-overflow", "heat series needs more than 1e5 edges per walk");
  }
  std::size_t lo = hi / 2;
  if (tail(0) <= eps) hi = 0;
  while (hi > 0 && hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (tail(mid) > eps ? lo : hi) = mid;
  }
  const std::size_t N = hi;
  const double b = tail(N);
  return {N, b};
}

SeriesResult heat_kernel(const MetricGraph& g, const BoundaryData& data, double t, const EdgePoint& x,
                         const EdgePoint& y, double eps, std::size_t max_states) {
  require_tadpole_free(g, "heat_kernel");
  if (!(t > 0.0)) throw validation_error("t must be positive");
  if (!(eps > 0.0)) throw validation_error("eps must be positive");
  const Matrix S = k_independent_scattering(g, data);
  const auto [N, bound] = heat_series_cutoff(g, S, t, eps);

  std::vector<double> lengths(g.num_internal());
  for (std::size_t i = 0; i < g.num_internal(); ++i) lengths[i] = g.internal(i).length;

  SeriesResult res;
  cplx sum = x.edge == y.edge ? cplx{gaussian_kernel(t, x.x - y.x), 0.0} : cplx{};
  // walks run from y's edge to x's edge
  for (const auto& cls : score_walk_sums(g, S, y.edge, x.edge, N, max_states)) {
    double len = 0.0;
    for (std::size_t i = 0; i < cls.score.size(); ++i) len += lengths[i] * cls.score[i];
    sum += cls.weight * gaussian_kernel(t, slot_dist(g, y, cls.from_slot) + len + slot_dist(g, x, cls.to_slot));
    res.walks_used += cls.count;
  }
  res.value = sum;
  res.comb_cutoff = N;
  res.tail_bound = bound;
  res.cutoff_length = g.num_internal() ? double(N + 1) * g.min_length() : std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace qgraph

#include "qgraph/walks.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "qgraph/errors.hpp"

namespace qgraph {

namespace {

cplx entry(const Matrix& S, std::size_t out, std::size_t in) {
  return S(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
}

/// Slot through which a traversal arrives at its head.
std::size_t arrival_slot(const MetricGraph& g, const Traversal& d) {
  const auto& e = g.internal(d.edge);
  return g.slot(d.head == e.to ? EndKind::Terminal : EndKind::Initial, d.edge);
}

std::size_t tail_of(const MetricGraph& g, const Traversal& d) {
  const auto& e = g.internal(d.edge);
  return d.head == e.to ? e.from : e.to;
}

/// Traversals compare by (edge index, head index); on a tadpole-free graph
/// this is a dense integer code.
std::uint32_t code_of(const MetricGraph& g, const Traversal& d) {
  const auto& e = g.internal(d.edge);
  const std::size_t hi = std::max(e.from, e.to);
  return static_cast<std::uint32_t>(2 * d.edge + (d.head == hi ? 1 : 0));
}

Traversal traversal_of_code(const MetricGraph& g, std::uint32_t code) {
  const auto& e = g.internal(code / 2);
  return {code / 2, (code % 2) ? std::max(e.from, e.to) : std::min(e.from, e.to)};
}

/// Smallest r ≥ 1 with seq rotated by r equal to seq.
std::size_t rotation_period(std::span<const std::uint32_t> seq) {
  const std::size_t m = seq.size();
  for (std::size_t r = 1; r < m; ++r) {
    if (m % r) continue;
    bool same = true;
    for (std::size_t i = 0; i < m && same; ++i) same = seq[i] == seq[(i + r) % m];
    if (same) return r;
  }
  return m;
}

/// True if seq is lexicographically ≤ each of its rotations.
bool is_minimal_rotation(std::span<const std::uint32_t> seq) {
  const std::size_t m = seq.size();
  for (std::size_t r = 1; r < m; ++r) {
    if (seq[r] != seq[0]) continue;
    for (std::size_t i = 0; i < m; ++i) {
      const auto a = seq[i], b = seq[(i + r) % m];
      if (a < b) break;
      if (a > b) return false;
    }
  }
  return true;
}

void require_walk_inputs(const MetricGraph& g, const BoundaryData& data, const char* op) {
  require_tadpole_free(g, op);
  check_boundary(g, data);
}

}  // namespace

cplx walk_weight(const MetricGraph& g, const Matrix& S, const Walk& w) {
  cplx weight{1.0, 0.0};
  EdgeRef prev = w.from;
  for (std::size_t l = 0; l < w.vertices.size(); ++l) {
    const EdgeRef next = l < w.interior.size() ? EdgeRef{false, w.interior[l]} : w.to;
    const auto in = g.slot_at(prev, w.vertices[l]);
    const auto out = g.slot_at(next, w.vertices[l]);
    if (!in || !out) throw validation_error("walk violates incidence");
    weight *= entry(S, *out, *in);
    prev = next;
  }
  return weight;
}

std::vector<Walk> enumerate_walks(const MetricGraph& g, const BoundaryData& data, EdgeRef j, EdgeRef jp,
                                  double lambda) {
  require_walk_inputs(g, data, "enumerate_walks");
  if (!(lambda >= 0.0)) throw validation_error("walk cutoff must be nonnegative");
  const Matrix S = k_independent_scattering(g, data);
  std::vector<Walk> out;
  const auto target_slots = g.slots_of(jp);

  Walk cur;
  cur.from = j;
  cur.to = jp;
  cur.score.assign(g.num_internal(), 0);

  // Depth-first over (arrival slot); emits a walk whenever jp touches the
  // current vertex.
  std::function<void(std::size_t, cplx)> dfs = [&](std::size_t in_slot, cplx w) {
    const std::size_t v = g.slot_vertex(in_slot);
    for (auto t : target_slots) {
      if (g.slot_vertex(t) != v) continue;
      Walk done = cur;
      done.weight = w * entry(S, t, in_slot);
      done.zero_weight = done.weight == cplx{};
      out.push_back(std::move(done));
    }
    for (auto o : g.star(v)) {
      auto p = g.partner(o);
      if (!p) continue;
      const std::size_t i = g.slot_edge_index(o);
      const double a = g.internal(i).length;
      if (cur.length + a > lambda * (1.0 + 1e-15)) continue;
      cur.interior.push_back(i);
      cur.vertices.push_back(g.slot_vertex(*p));
      cur.score[i] += 1;
      const double saved = cur.length;
      cur.length += a;
      dfs(*p, w * entry(S, o, in_slot));
      cur.length = saved;
      cur.score[i] -= 1;
      cur.vertices.pop_back();
      cur.interior.pop_back();
    }
  };
  for (auto s0 : g.slots_of(j)) {
    cur.vertices = {g.slot_vertex(s0)};
    dfs(s0, cplx{1.0, 0.0});
  }

  auto key = [](const Walk& w) {
    std::vector<std::size_t> k{w.comb_length(), w.vertices[0]};
    for (std::size_t l = 0; l < w.interior.size(); ++l) {
      k.push_back(w.interior[l]);
      k.push_back(w.vertices[l + 1]);
    }
    return k;
  };
  std::stable_sort(out.begin(), out.end(), [&](const Walk& a, const Walk& b) { return key(a) < key(b); });
  return out;
}

Cycle make_cycle(const MetricGraph& g, const Matrix& S, std::vector<Traversal> steps) {
  if (steps.size() < 2) throw validation_error("a cycle needs at least two traversals");
  const std::size_t m = steps.size();
  for (std::size_t l = 0; l < m; ++l) {
    if (steps[l].edge >= g.num_internal() || g.is_tadpole(steps[l].edge))
      throw validation_error("cycle traverses an invalid or tadpole edge");
    const auto& e = g.internal(steps[l].edge);
    if (steps[l].head != e.from && steps[l].head != e.to) throw validation_error("cycle head not incident");
    if (tail_of(g, steps[(l + 1) % m]) != steps[l].head) throw validation_error("cycle steps do not connect");
  }
  std::vector<std::uint32_t> codes(m);
  for (std::size_t l = 0; l < m; ++l) codes[l] = code_of(g, steps[l]);
  std::size_t best = 0;
  for (std::size_t r = 1; r < m; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto a = codes[(r + i) % m], b = codes[(best + i) % m];
      if (a < b) {
        best = r;
        break;
      }
      if (a > b) break;
    }
  }
  std::rotate(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(best), steps.end());
  std::rotate(codes.begin(), codes.begin() + static_cast<std::ptrdiff_t>(best), codes.end());

  Cycle c;
  c.steps = std::move(steps);
  const std::size_t period = rotation_period(codes);
  c.power = m / period;
  std::vector<cplx> factors(m);
  for (std::size_t l = 0; l < m; ++l) {
    const auto& next = c.steps[(l + 1) % m];
    const std::size_t out = g.partner(arrival_slot(g, next)).value();
    factors[l] = entry(S, out, arrival_slot(g, c.steps[l]));
    c.length += g.internal(c.steps[l].edge).length;
  }
  c.weight = c.base_weight = cplx{1.0, 0.0};
  for (std::size_t l = 0; l < m; ++l) {
    c.weight *= factors[l];
    if (l < period) c.base_weight *= factors[l];
  }
  return c;
}

std::vector<std::string> cycle_representative(const MetricGraph& g, const Cycle& c) {
  std::vector<std::string> out;
  for (const auto& d : c.steps) {
    out.push_back(g.internal(d.edge).id);
    out.push_back(g.vertices()[d.head]);
  }
  out.push_back(g.internal(c.steps.front().edge).id);
  return out;
}

Cycle reversed(const MetricGraph& g, const Matrix& S, const Cycle& c) {
  std::vector<Traversal> rev;
  for (auto it = c.steps.rbegin(); it != c.steps.rend(); ++it) rev.push_back({it->edge, tail_of(g, *it)});
  return make_cycle(g, S, std::move(rev));
}

std::pair<Cycle, std::size_t> primitive_decompose(const Cycle& c) {
  Cycle base;
  const std::size_t period = c.steps.size() / c.power;
  base.steps.assign(c.steps.begin(), c.steps.begin() + static_cast<std::ptrdiff_t>(period));
  base.length = c.length / static_cast<double>(c.power);
  base.weight = base.base_weight = c.base_weight;
  base.power = 1;
  return {base, c.power};
}

double cycle_flux(const MetricGraph& g, const Cycle& c, const std::vector<double>& slot_phases) {
  if (slot_phases.size() != g.num_slots()) throw validation_error("phase vector does not cover every slot");
  const std::size_t m = c.steps.size();
  double flux = 0.0;
  for (std::size_t l = 0; l < m; ++l) {
    const std::size_t in = arrival_slot(g, c.steps[l]);
    const std::size_t out = g.partner(arrival_slot(g, c.steps[(l + 1) % m])).value();
    flux += slot_phases[in] - slot_phases[out];
  }
  return flux;
}

double cycle_flux(const MetricGraph& g, const Cycle& c,
                  const std::map<std::string, std::map<std::string, double>>& phases) {
  std::vector<double> slot_phases(g.num_slots(), 0.0);
  const std::size_t m = c.steps.size();
  auto lookup = [&](std::size_t slot) {
    const auto& vid = g.vertices()[g.slot_vertex(slot)];
    const auto& eid = g.edge_id(g.slot_edge(slot));
    auto vit = phases.find(vid);
    if (vit == phases.end() || !vit->second.count(eid))
      throw Error(ErrorKind::Validation, "missing-phase", "no phase for edge '" + eid + "' at vertex '" + vid + "'");
    slot_phases[slot] = vit->second.at(eid);
  };
  for (std::size_t l = 0; l < m; ++l) {
    lookup(arrival_slot(g, c.steps[l]));
    lookup(g.partner(arrival_slot(g, c.steps[(l + 1) % m])).value());
  }
  return cycle_flux(g, c, slot_phases);
}

std::size_t num_cycle_roots(const MetricGraph& g) { return 2 * g.num_internal(); }

std::size_t visit_cycles(const MetricGraph& g, const Matrix& S, double lambda,
                         const std::function<void(std::size_t, const CycleView&)>& visit, unsigned threads,
                         std::size_t max_nodes) {
  require_tadpole_free(g, "visit_cycles");
  const std::size_t roots = num_cycle_roots(g);
  if (roots == 0 || !(lambda > 0.0)) return 0;
  const double cutoff = lambda * (1.0 + 1e-15);

  // Outgoing moves from each arrival slot: (leave slot, traversal code, arrival slot).
  struct Move {
    std::size_t out, next_in;
    std::uint32_t code;
    double length;
  };
  std::vector<std::vector<Move>> moves(g.num_slots());
  for (std::size_t in = 0; in < g.num_slots(); ++in) {
    for (auto o : g.star(g.slot_vertex(in))) {
      auto p = g.partner(o);
      if (!p) continue;
      const std::size_t i = g.slot_edge_index(o);
      const Traversal d{i, g.slot_vertex(*p)};
      moves[in].push_back({o, *p, code_of(g, d), g.internal(i).length});
    }
    std::sort(moves[in].begin(), moves[in].end(), [](const Move& a, const Move& b) { return a.code < b.code; });
  }

  std::atomic<std::size_t> total{0}, nodes{0}, next_root{0};
  std::atomic<bool> overflow{false};

  auto run_root = [&](std::size_t root) {
    const Traversal d0 = traversal_of_code(g, static_cast<std::uint32_t>(root));
    const std::uint32_t c0 = static_cast<std::uint32_t>(root);
    const std::size_t start_in = arrival_slot(g, d0);
    const std::size_t close_out = g.partner(start_in).value();
    const std::size_t close_vertex = g.slot_vertex(close_out);
    const double a0 = g.internal(d0.edge).length;
    if (a0 > cutoff) return;

    std::vector<std::uint32_t> codes{c0};
    std::vector<std::size_t> arrivals{start_in};
    std::vector<cplx> prefix{cplx{1.0, 0.0}};  // product of the first l transition factors
    std::vector<double> lengths{a0};
    std::vector<std::size_t> cursor{0};
    std::vector<Traversal> steps;
    std::size_t local_nodes = 0;

    while (!cursor.empty()) {
      if (overflow.load(std::memory_order_relaxed)) return;
      const std::size_t depth = cursor.size() - 1;
      const std::size_t in = arrivals[depth];
      if (cursor[depth] == 0 && g.slot_vertex(in) == close_vertex) {
        // closes up: check canonical form and report
        if (is_minimal_rotation(codes)) {
          const std::size_t m = codes.size();
          const cplx w = prefix[depth] * entry(S, close_out, in);
          const std::size_t period = rotation_period(codes);
          steps.resize(m);
          for (std::size_t l = 0; l < m; ++l) steps[l] = traversal_of_code(g, codes[l]);
          cplx base{1.0, 0.0};
          if (period == m) {
            base = w;
          } else {
            for (std::size_t l = 0; l < period; ++l) {
              const std::size_t out = (l + 1 < m) ? g.partner(arrivals[l + 1]).value() : close_out;
              base *= entry(S, out, arrivals[l]);
            }
          }
          visit(root, CycleView{std::span<const Traversal>(steps), lengths[depth], w, base, m / period});
          total.fetch_add(1, std::memory_order_relaxed);
        }
      }
      const auto& mv = moves[in];
      std::size_t& c = cursor[depth];
      while (c < mv.size() && (mv[c].code < c0 || lengths[depth] + mv[c].length > cutoff)) ++c;
      if (c >= mv.size()) {
        cursor.pop_back();
        codes.pop_back();
        arrivals.pop_back();
        prefix.pop_back();
        lengths.pop_back();
        continue;
      }
      const Move& step = mv[c++];
      codes.push_back(step.code);
      arrivals.push_back(step.next_in);
      prefix.push_back(prefix[depth] * entry(S, step.out, in));
      lengths.push_back(lengths[depth] + step.length);
      cursor.push_back(0);
      if (++local_nodes % 4096 == 0) {
        if (nodes.fetch_add(4096, std::memory_order_relaxed) + 4096 > max_nodes) {
          overflow = true;
          return;
        }
      }
    }
  };

  const unsigned nthreads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(roots)));
  if (nthreads == 1) {
    for (std::size_t r = 0; r < roots; ++r) run_root(r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (std::size_t r; (r = next_root.fetch_add(1)) < roots;) run_root(r);
      });
    for (auto& th : pool) th.join();
  }
  if (overflow)
    throw numeric_error("cutoff-overflow", "cycle enumeration exceeded " + std::to_string(max_nodes) +
                                               " search nodes; lower the cutoff or raise eps");
  return total.load();
}

std::vector<Cycle> enumerate_cycles(const MetricGraph& g, const BoundaryData& data, double lambda, unsigned threads) {
  require_walk_inputs(g, data, "enumerate_cycles");
  if (g.num_internal() == 0) return {};
  const Matrix S = k_independent_scattering(g, data);
  std::vector<std::vector<Cycle>> per_root(num_cycle_roots(g));
  visit_cycles(
      g, S, lambda,
      [&](std::size_t root, const CycleView& v) {
        Cycle c;
        c.steps.assign(v.steps.begin(), v.steps.end());
        c.length = v.length;
        c.weight = v.weight;
        c.base_weight = v.base_weight;
        c.power = v.power;
        per_root[root].push_back(std::move(c));
      },
      threads);
  std::vector<Cycle> out;
  for (auto& r : per_root)
    for (auto& c : r) out.push_back(std::move(c));
  std::stable_sort(out.begin(), out.end(), [](const Cycle& a, const Cycle& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.steps < b.steps;
  });
  return out;
}

std::vector<ScoreSum> score_walk_sums(const MetricGraph& g, const Matrix& S, EdgeRef from, EdgeRef to,
                                      std::size_t max_comb, std::size_t max_states) {
  require_tadpole_free(g, "score_walk_sums");
  using Score = std::vector<std::uint32_t>;
  struct Cell {
    cplx weight;
    double count = 0.0;
  };
  // key: (score, from slot, arrival slot)
  using Key = std::tuple<Score, std::size_t, std::size_t>;
  std::map<Key, Cell> level;
  for (auto s0 : g.slots_of(from)) level[{Score(g.num_internal(), 0), s0, s0}] = {cplx{1.0, 0.0}, 1.0};

  const auto to_slots = g.slots_of(to);
  std::map<std::tuple<std::size_t, Score, std::size_t, std::size_t>, Cell> sums;
  std::size_t expanded = 0;
  for (std::size_t n = 0;; ++n) {
    for (const auto& [key, cell] : level) {
      const auto& [score, s0, in] = key;
      const std::size_t v = g.slot_vertex(in);
      for (auto t : to_slots) {
        if (g.slot_vertex(t) != v) continue;
        auto& acc = sums[{n, score, s0, t}];
        acc.weight += cell.weight * entry(S, t, in);
        acc.count += cell.count;
      }
    }
    if (n == max_comb) break;
    std::map<Key, Cell> next;
    for (const auto& [key, cell] : level) {
      const auto& [score, s0, in] = key;
      if (++expanded > max_states)
        throw numeric_error("cutoff-overflow", "walk expansion exceeded " + std::to_string(max_states) + " states");
      for (auto o : g.star(g.slot_vertex(in))) {
        auto p = g.partner(o);
        if (!p) continue;
        Score s = score;
        s[g.slot_edge_index(o)] += 1;
        auto& dst = next[{std::move(s), s0, *p}];
        dst.weight += cell.weight * entry(S, o, in);
        dst.count += cell.count;
      }
    }
    level = std::move(next);
    if (level.empty()) break;
  }
  std::vector<ScoreSum> out;
  out.reserve(sums.size());
  for (const auto& [key, cell] : sums) {
    const auto& [n, score, s0, t] = key;
    out.push_back({score, n, s0, t, cell.weight, cell.count});
  }
  return out;
}

}  // namespace qgraph

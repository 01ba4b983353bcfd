#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "qgraph/errors.hpp"
#include "qgraph/walks.hpp"
#include "support.hpp"

using namespace qgraph;

namespace {

EdgeRef internal_edge(std::size_t i) { return {false, i}; }

std::size_t reflections(const Walk& w) {
  std::size_t n = 0;
  std::vector<std::size_t> seq;
  if (!w.from.external) seq.push_back(w.from.index);
  for (auto i : w.interior) seq.push_back(i);
  if (!w.to.external) seq.push_back(w.to.index);
  for (std::size_t l = 0; l + 1 < seq.size(); ++l) n += seq[l] == seq[l + 1];
  return n;
}

}  // namespace

TEST_CASE("interval walks up to 2.5a") {
  const auto doc = testing::fixture("interval_neumann");
  const auto walks = enumerate_walks(doc.graph, doc.boundary, internal_edge(0), internal_edge(0), 2.5);
  REQUIRE(walks.size() == 6);
  std::map<std::size_t, int> per_length;
  for (const auto& w : walks) {
    ++per_length[w.comb_length()];
    CHECK(w.weight == cplx(1.0));
    CHECK(w.length == double(w.comb_length()));
  }
  CHECK(per_length == std::map<std::size_t, int>{{0, 2}, {1, 2}, {2, 2}});
  CHECK(walks[0].trivial());
  CHECK(walks[0].v_minus() == 0);
  CHECK(walks[1].v_minus() == 1);
}

TEST_CASE("star without internal edges has one walk per pair") {
  const auto doc = testing::fixture("star3");
  for (double lambda : {0.0, 10.0}) {
    const auto walks = enumerate_walks(doc.graph, doc.boundary, {true, 0}, {true, 1}, lambda);
    REQUIRE(walks.size() == 1);
    CHECK(walks[0].trivial());
    CHECK(std::abs(walks[0].weight - cplx(2.0 / 3.0)) < 1e-15);
  }
}

TEST_CASE("weights on a regular graph") {
  const auto doc = testing::fixture("tetrahedron");
  const auto walks = enumerate_walks(doc.graph, doc.boundary, internal_edge(0), internal_edge(5), 3.5);
  CHECK(walks.size() > 20);
  for (const auto& w : walks) {
    const std::size_t refl = reflections(w);
    const std::size_t trans = w.vertices.size() - refl;
    const double expected = std::pow(-1.0 / 3.0, double(refl)) * std::pow(2.0 / 3.0, double(trans));
    CHECK(std::abs(w.weight - cplx(expected)) < 1e-14);
  }
}

TEST_CASE("walk enumeration matches the exhaustive oracle") {
  for (const char* name : {"theta", "star_internal", "lasso"}) {
    const auto doc = testing::fixture(name);
    const auto& g = doc.graph;
    const double lambda = 4.0 * g.min_length();
    std::vector<EdgeRef> edges;
    for (std::size_t i = 0; i < g.num_internal(); ++i) edges.push_back(internal_edge(i));
    for (std::size_t e = 0; e < g.num_external(); ++e) edges.push_back({true, e});
    for (auto j : edges)
      for (auto jp : edges) {
        const auto walks = enumerate_walks(g, doc.boundary, j, jp, lambda);
        auto oracle = testing::brute_force_walks(g, doc.boundary, j, jp, lambda);
        std::vector<testing::OracleWalk> mine;
        for (const auto& w : walks) {
          mine.push_back({w.interior, w.vertices, w.weight});
          double len = 0.0;
          for (std::size_t i = 0; i < g.num_internal(); ++i) len += g.internal(i).length * w.score[i];
          CHECK(std::abs(len - w.length) < 1e-14);
        }
        std::sort(mine.begin(), mine.end());
        std::sort(oracle.begin(), oracle.end());
        REQUIRE(mine.size() == oracle.size());
        for (std::size_t n = 0; n < mine.size(); ++n) {
          CHECK(mine[n].interior == oracle[n].interior);
          CHECK(mine[n].vertices == oracle[n].vertices);
          CHECK(std::abs(mine[n].weight - oracle[n].weight) < 1e-14);
        }
      }
  }
}

TEST_CASE("reversed walks have conjugate weights") {
  std::mt19937_64 rng(11);
  const auto doc = testing::fixture("theta");
  std::vector<double> phases(doc.graph.num_slots());
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (auto& p : phases) p = U(rng);
  const auto mag = apply_magnetic(doc.graph, doc.boundary, phases);
  const Matrix S = k_independent_scattering(doc.graph, mag);
  const auto walks = enumerate_walks(doc.graph, mag, internal_edge(0), internal_edge(2), 3.0);
  const auto back = enumerate_walks(doc.graph, mag, internal_edge(2), internal_edge(0), 3.0);
  REQUIRE(walks.size() == back.size());
  for (const auto& w : walks) {
    Walk r;
    r.from = w.to;
    r.to = w.from;
    r.vertices.assign(w.vertices.rbegin(), w.vertices.rend());
    r.interior.assign(w.interior.rbegin(), w.interior.rend());
    CHECK(std::abs(walk_weight(doc.graph, S, r) - std::conj(w.weight)) < 1e-14);
    CHECK(std::abs(walk_weight(doc.graph, S, w) - w.weight) < 1e-14);
  }
}

TEST_CASE("score sums aggregate the enumerated walks") {
  const auto doc = testing::fixture("theta");
  const auto& g = doc.graph;
  const Matrix S = k_independent_scattering(g, doc.boundary);
  const EdgeRef from = internal_edge(1), to = internal_edge(2);
  const auto sums = score_walk_sums(g, S, from, to, 4);
  std::map<std::vector<std::uint32_t>, std::pair<cplx, double>> a, b;
  for (const auto& s : sums) {
    a[s.score].first += s.weight;
    a[s.score].second += s.count;
  }
  for (const auto& w : enumerate_walks(g, doc.boundary, from, to, 4.0 * g.max_length() + 0.01))
    if (w.comb_length() <= 4) {
      b[w.score].first += w.weight;
      b[w.score].second += 1.0;
    }
  REQUIRE(a.size() == b.size());
  for (const auto& [score, v] : a) {
    CHECK(std::abs(v.first - b[score].first) < 1e-13);
    CHECK(v.second == b[score].second);
  }
}

TEST_CASE("interval cycles") {
  const auto doc = testing::fixture("interval_neumann");
  const auto cycles = enumerate_cycles(doc.graph, doc.boundary, 6.5);
  REQUIRE(cycles.size() == 3);
  for (std::size_t p = 1; p <= 3; ++p) {
    const auto& c = cycles[p - 1];
    CHECK(c.power == p);
    CHECK(c.length == doctest::Approx(2.0 * double(p)));
    CHECK(c.weight == cplx(1.0));
    const Matrix S = k_independent_scattering(doc.graph, doc.boundary);
    CHECK(reversed(doc.graph, S, c).steps == c.steps);
  }
  const auto [base, p] = primitive_decompose(cycles[1]);
  CHECK(p == 2);
  CHECK(base.steps == cycles[0].steps);
  CHECK(primitive_decompose(cycles[0]).second == 1);
  CHECK(cycle_representative(doc.graph, cycles[0]) == std::vector<std::string>{"i1", "v1", "i1", "v2", "i1"});
}

TEST_CASE("circle has two orientations per length") {
  const auto doc = testing::fixture("circle");
  std::vector<Cycle> cycles;
  for (const auto& c : enumerate_cycles(doc.graph, doc.boundary, 2.5)) {
    if (c.zero_weight()) {
      CHECK(c.comb_length() == 2);  // reflection at a transparent vertex
      continue;
    }
    cycles.push_back(c);
  }
  REQUIRE(cycles.size() == 2);
  for (const auto& c : cycles) {
    CHECK(c.length == doctest::Approx(2.0));
    CHECK(std::abs(c.weight - cplx(1.0)) < 1e-15);
    CHECK(c.primitive());
  }
  CHECK(cycles[0].steps != cycles[1].steps);
}

TEST_CASE("no cycles below twice the shortest edge") {
  const auto doc = testing::fixture("theta");
  CHECK(enumerate_cycles(doc.graph, doc.boundary, 2.0 * doc.graph.min_length() * 0.999).empty());
  CHECK_FALSE(enumerate_cycles(doc.graph, doc.boundary, 2.0 * doc.graph.min_length() * 1.001).empty());
}

TEST_CASE("cycle set properties on the theta graph") {
  const auto doc = testing::fixture("theta");
  const auto& g = doc.graph;
  const Matrix S = k_independent_scattering(g, doc.boundary);
  const auto cycles = enumerate_cycles(g, doc.boundary, 5.0);
  std::set<std::vector<Traversal>> all;
  for (const auto& c : cycles) all.insert(c.steps);
  CHECK(all.size() == cycles.size());
  for (const auto& c : cycles) {
    const Cycle r = reversed(g, S, c);
    CHECK(all.count(r.steps) == 1);
    CHECK(std::abs(r.weight - std::conj(c.weight)) < 1e-14);
    CHECK(std::abs(c.weight - std::pow(c.base_weight, double(c.power))) < 1e-14);
    // every rotation canonicalizes to the same cycle
    for (std::size_t rot = 1; rot < c.steps.size(); ++rot) {
      auto steps = c.steps;
      std::rotate(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(rot), steps.end());
      const Cycle again = make_cycle(g, S, steps);
      CHECK(again.steps == c.steps);
      CHECK(std::abs(again.weight - c.weight) < 1e-15);
    }
  }
  // independent of thread count
  const auto threaded = enumerate_cycles(g, doc.boundary, 5.0, 4);
  REQUIRE(threaded.size() == cycles.size());
  for (std::size_t n = 0; n < cycles.size(); ++n) {
    CHECK(threaded[n].steps == cycles[n].steps);
    CHECK(threaded[n].weight == cycles[n].weight);
  }
}

TEST_CASE("cycle flux") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  const auto doc = testing::fixture("theta");
  const auto& g = doc.graph;
  std::vector<double> phases(g.num_slots());
  for (auto& p : phases) p = U(rng);
  const auto mag = apply_magnetic(g, doc.boundary, phases);
  const Matrix S0 = k_independent_scattering(g, doc.boundary), S1 = k_independent_scattering(g, mag);
  const std::vector<double> flat(g.num_slots(), 0.7);
  for (const auto& c : enumerate_cycles(g, doc.boundary, 4.5)) {
    CHECK(std::abs(cycle_flux(g, c, flat)) < 1e-15);
    const double phi = cycle_flux(g, c, phases);
    CHECK(std::abs(cycle_flux(g, reversed(g, S0, c), phases) + phi) < 1e-13);
    const Cycle m = make_cycle(g, S1, c.steps);
    CHECK(std::abs(m.weight - c.weight * std::exp(cplx(0.0, phi))) < 1e-12);
  }
}

TEST_CASE("flux by vertex and edge id needs every incidence") {
  const auto doc = testing::fixture("circle");
  const auto all = enumerate_cycles(doc.graph, doc.boundary, 2.5);
  const auto c = *std::find_if(all.begin(), all.end(), [](const Cycle& x) { return !x.zero_weight(); });
  std::map<std::string, std::map<std::string, double>> phases{{"v1", {{"i1", 0.5}, {"i2", 0.1}}},
                                                               {"v2", {{"i1", -0.2}, {"i2", 0.3}}}};
  const double phi = cycle_flux(doc.graph, c, phases);
  CHECK(std::abs(std::abs(phi) - 0.9) < 1e-15);
  phases["v2"].erase("i2");
  try {
    cycle_flux(doc.graph, c, phases);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == "missing-phase");
  }
}

TEST_CASE("tadpoles are refused") {
  const auto doc = testing::fixture("tadpole");
  CHECK_THROWS_AS(enumerate_walks(doc.graph, doc.boundary, {true, 0}, {true, 0}, 3.0), Error);
  CHECK_THROWS_AS(enumerate_cycles(doc.graph, doc.boundary, 3.0), Error);
}

#include <doctest.h>

#include <numbers>

#include "qgraph/errors.hpp"
#include "qgraph/inverse.hpp"
#include "support.hpp"

using namespace qgraph;

TEST_CASE("reduced length spectrum of the interval") {
  const auto doc = testing::fixture("interval_neumann");
  const auto groups = reduced_length_spectrum(doc.graph, doc.boundary, 8.5);
  REQUIRE(groups.size() == 4);
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(groups[p].length == doctest::Approx(2.0 * double(p + 1)));
    CHECK(std::abs(groups[p].amplitude - cplx(2.0)) < 1e-14);
  }
}

TEST_CASE("reduced length spectrum of the circle") {
  const auto doc = testing::fixture("circle");
  const auto groups = reduced_length_spectrum(doc.graph, doc.boundary, 6.5);
  REQUIRE(groups.size() == 3);
  for (const auto& gr : groups) {
    CHECK(std::abs(gr.amplitude - cplx(4.0)) < 1e-13);
    CHECK(gr.cycles == 2);  // zero-weight cycles of the same length are not counted
  }
}

TEST_CASE("a vanishing scattering entry removes a length") {
  // the middle vertex is transparent, so cycles reflecting there have weight zero
  const auto g = MetricGraph::create({"a", "m", "b"}, {{"i1", "a", "m", 1.0}, {"i2", "m", "b", 1.7}}, {});
  const auto data = uniform_boundary(g, Preset::Standard);
  const auto groups = reduced_length_spectrum(g, data, 6.0);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].length == doctest::Approx(5.4));
  CHECK(std::abs(groups[0].amplitude - cplx(5.4)) < 1e-13);
}

TEST_CASE("recovery from the interval spectrum") {
  const auto doc = testing::fixture("interval_neumann");
  const auto spec = eigenvalues(doc.graph, doc.boundary, 200.0, 1e-10);
  const auto rec = recover_length_spectrum(spec, {9.0, 0.0, 0.05});
  REQUIRE(rec.peaks.size() == 4);
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(std::abs(rec.peaks[p].omega - 2.0 * double(p + 1)) < 0.02);
    CHECK(std::abs(rec.peaks[p].amplitude - 2.0) < 0.05);
  }
  // even in ω by construction: only nonnegative ω sampled
  CHECK(rec.omega.front() == 0.0);
}

TEST_CASE("recovery needs enough spectrum") {
  const auto doc = testing::fixture("interval_neumann");
  const auto spec = eigenvalues(doc.graph, doc.boundary, 20.0, 1e-10);
  CHECK_THROWS_AS(recover_length_spectrum(spec, {9.0, 0.01, 0.05}), Error);
}

TEST_CASE("null case has no peaks") {
  // two external edges at one vertex: no internal edges, no cycles
  const auto g = MetricGraph::create({"v"}, {}, {{"e1", "v"}, {"e2", "v"}});
  const auto data = uniform_boundary(g, Preset::Standard);
  const ScatteringPhase phase(g, data, 50.0);
  const auto rec = recover_length_spectrum(phase, 0, {}, {6.0, 0.0, 0.05});
  for (double f : rec.transform) CHECK(std::abs(f - rec.transform.front()) < 1e-9);
}

TEST_CASE("recovery from the scattering phase") {
  const auto doc = testing::fixture("lasso");
  const ScatteringPhase phase(doc.graph, doc.boundary, 100.0);
  // the loop carries embedded eigenvalues k = nπ that vanish at the junction
  const auto spec = eigenvalues(doc.graph, doc.boundary, 100.0, 1e-11);
  REQUIRE(spec.candidates.size() == 31);
  for (std::size_t n = 0; n < spec.candidates.size(); ++n)
    CHECK(std::abs(spec.candidates[n].k - std::numbers::pi * double(n + 1)) < 1e-9);
  const auto rec = recover_length_spectrum(phase, 0, spec.candidates, {6.0, 0.0, 0.05});
  CHECK(rec.length_estimate == doctest::Approx(doc.graph.total_length()).epsilon(0.01));
  const auto truth = reduced_length_spectrum(doc.graph, doc.boundary, 6.5);
  double top = 0.0;
  for (const auto& gr : truth) top = std::max(top, std::abs(gr.amplitude));
  for (const auto& gr : truth) {
    if (gr.length > 5.8 || std::abs(gr.amplitude) < 0.1 * top) continue;
    bool found = false;
    for (const auto& p : rec.peaks)
      if (std::abs(p.omega - gr.length) < 0.02) {
        found = true;
        CHECK(std::abs(p.amplitude - gr.amplitude.real()) < 0.1 * top);
      }
    CHECK(found);
  }
  for (const auto& p : rec.peaks) {
    bool near = false;
    for (const auto& gr : truth) near = near || std::abs(p.omega - gr.length) < 0.02;
    CHECK(near);
  }
}

TEST_CASE("integer relations") {
  CHECK(find_integer_relation({1.0, std::sqrt(2.0)}, 20, 1e-9).empty());
  CHECK(find_integer_relation({1.0, 2.0}, 20, 1e-9) == std::vector<long long>{2, -1});
  CHECK(find_integer_relation({0.5, 0.7, 1.2}, 20, 1e-9) == std::vector<long long>{1, 1, -1});
  CHECK(find_integer_relation({1.0, 1.0 / 3.0}, 20, 1e-9) == std::vector<long long>{1, -3});
}

TEST_CASE("inverse hypotheses") {
  const auto theta = testing::fixture("theta");
  const auto rep = check_inverse_hypotheses(theta.graph, theta.boundary);
  CHECK(rep.relation_search_done);
  CHECK(rep.lengths_rationally_independent);
  CHECK(rep.all_s_entries_nonzero);
  CHECK(rep.degree_two_standard.empty());

  const auto circle = testing::fixture("circle");
  const auto rc = check_inverse_hypotheses(circle.graph, circle.boundary);
  CHECK_FALSE(rc.lengths_rationally_independent);  // 0.8 and 1.2 satisfy 3·0.8 − 2·1.2 = 0
  CHECK(rc.relation == std::vector<long long>{3, -2});
  CHECK_FALSE(rc.all_s_entries_nonzero);
  CHECK(rc.degree_two_standard.size() == 2);
  CHECK(rc.zero_entries.size() == 4);
}

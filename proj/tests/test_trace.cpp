#include <doctest.h>

#include <numbers>
#include <random>

#include "qgraph/errors.hpp"
#include "qgraph/trace.hpp"
#include "qgraph/walks.hpp"
#include "support.hpp"

using namespace qgraph;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("interval: cycle side equals the theta series") {
  const auto doc = testing::fixture("interval_neumann");
  const double t = 0.1;
  double sum = 0.0;
  for (int p = 1; p < 50; ++p) sum += std::exp(-p * p / t);
  const double expected = 1.0 / (2.0 * std::sqrt(kPi * t)) + 0.5 + sum / std::sqrt(kPi * t);
  const auto c = heat_trace_cycles(doc.graph, doc.boundary, {t}, 1e-12);
  CHECK(std::abs(c.value[0] - cplx(expected)) < 1e-12);
  CHECK(c.constant == doctest::Approx(0.5));

  double spec = 0.0;
  for (int n = 0; n < 100; ++n) spec += std::exp(-t * n * n * kPi * kPi);
  const auto s = heat_trace_spectral(doc.graph, doc.boundary, {t}, 1e-12);
  CHECK(std::abs(s.value[0] - spec) < 1e-11);
}

TEST_CASE("constant term for standard conditions") {
  for (const char* name : {"theta", "tetrahedron", "star_internal", "lasso", "circle"}) {
    const auto doc = testing::fixture(name);
    const auto& g = doc.graph;
    const double V = double(g.num_vertices()), I = double(g.num_internal()), E = double(g.num_external());
    const auto plus = heat_trace_cycles(g, doc.boundary, {1.0}, 1e-6, CompareSign::Neumann);
    const auto minus = heat_trace_cycles(g, doc.boundary, {1.0}, 1e-6, CompareSign::Dirichlet);
    CHECK(std::abs(plus.constant - (V - I - E) / 2.0) < 1e-13);
    CHECK(std::abs(minus.constant - (V - I) / 2.0) < 1e-13);
  }
}

TEST_CASE("circle: both sides agree") {
  const auto doc = testing::fixture("circle");
  const std::vector<double> t{0.05, 0.2, 1.0};
  const auto rep = compare_traces(doc.graph, doc.boundary, t, 1e-11);
  CHECK(rep.ok);
  for (std::size_t j = 0; j < t.size(); ++j) {
    double spec = 1.0;
    for (int n = 1; n < 100; ++n) spec += 2.0 * std::exp(-t[j] * n * n * kPi * kPi);
    CHECK(std::abs(rep.spectral.value[j] - spec) < 1e-10);
    CHECK(rep.abs_discrepancy[j] < 1e-10);
  }
}

TEST_CASE("tail bound decreases with the cutoff") {
  const auto doc = testing::fixture("theta");
  const Matrix S = k_independent_scattering(doc.graph, doc.boundary);
  for (double t : {0.05, 0.5, 1.0}) {
    double prev = cycle_tail_bound(doc.graph, S, t, 1.0);
    for (double cut = 1.5; cut < 20.0; cut += 0.5) {
      const double b = cycle_tail_bound(doc.graph, S, t, cut);
      CHECK(b <= prev);
      prev = b;
    }
    const double c = cycle_cutoff(doc.graph, S, t, 1e-10);
    CHECK(cycle_tail_bound(doc.graph, S, t, c) <= 1e-10);
  }
}

TEST_CASE("monotone truncation on the theta graph") {
  const auto doc = testing::fixture("theta");
  const auto& g = doc.graph;
  const Matrix S = k_independent_scattering(g, doc.boundary);
  const double t = 0.3;
  const auto cycles = enumerate_cycles(g, doc.boundary, 14.0);
  auto partial = [&](double cut) {
    cplx s{};
    for (const auto& c : cycles)
      if (c.length <= cut) s += c.weight * (c.length / double(c.power)) * std::exp(-c.length * c.length / (4.0 * t));
    return s / (2.0 * std::sqrt(kPi * t));
  };
  for (double cut = 3.0; cut < 12.0; cut += 1.0) {
    const double bound = cycle_tail_bound(g, S, t, cut);
    CHECK(std::abs(partial(14.0) - partial(cut)) <= bound);
  }
}

TEST_CASE("magnetic phases keep the cycle side real") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  const auto doc = testing::fixture("theta");
  std::vector<double> phases(doc.graph.num_slots());
  for (auto& p : phases) p = U(rng);
  const auto mag = apply_magnetic(doc.graph, doc.boundary, phases);
  const auto c0 = heat_trace_cycles(doc.graph, doc.boundary, {0.4}, 1e-10);
  const auto c1 = heat_trace_cycles(doc.graph, mag, {0.4}, 1e-10);
  CHECK(std::abs(c1.value[0].imag()) < 1e-12);
  CHECK(std::abs(c1.constant - c0.constant) < 1e-12);
  CHECK(std::abs(c1.value[0] - c0.value[0]) > 1e-6);
}

TEST_CASE("noncompact graph: both sides agree") {
  for (const char* name : {"dirichlet_capped", "star_internal", "lasso"}) {
    const auto doc = testing::fixture(name);
    for (auto sign : {CompareSign::Neumann, CompareSign::Dirichlet}) {
      const auto rep = compare_traces(doc.graph, doc.boundary, {0.2, 0.6}, 1e-8, sign);
      for (std::size_t j = 0; j < 2; ++j) CHECK(rep.abs_discrepancy[j] < 1e-7);
    }
  }
}

TEST_CASE("trace preconditions") {
  const auto doc = testing::fixture("tadpole");
  CHECK_THROWS_AS(heat_trace_cycles(doc.graph, doc.boundary, {0.1}, 1e-8), Error);
  const auto theta = testing::fixture("theta");
  CHECK_THROWS_AS(heat_trace_cycles(theta.graph, theta.boundary, {-0.1}, 1e-8), Error);
  CHECK(compare_sign_from_string("dirichlet") == CompareSign::Dirichlet);
  CHECK_THROWS_AS(compare_sign_from_string("robin"), Error);
}

#include <doctest.h>

#include "qgraph/errors.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/io.hpp"
#include "support.hpp"

using namespace qgraph;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    load_document(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("document was accepted");
  return ErrorKind::Numeric;
}

}  // namespace

TEST_CASE("smallest compact graph") {
  const auto doc = testing::fixture("interval_neumann");
  const auto& g = doc.graph;
  CHECK(g.num_vertices() == 2);
  CHECK(g.num_internal() == 1);
  CHECK(g.num_external() == 0);
  const auto rep = validate(g);
  CHECK(rep.degree_sum_ok);
  CHECK(rep.connected);
  CHECK(rep.compact);
  CHECK(rep.euler_number == -1);
  CHECK(rep.total_length == 1.0);
}

TEST_CASE("vertex with two external edges") {
  const auto g = load_graph(R"({"vertices":["v"],"external_edges":[{"id":"e1","vertex":"v"},{"id":"e2","vertex":"v"}]})");
  CHECK(g.degree(0) == 2);
  CHECK_FALSE(validate(g).compact);
}

TEST_CASE("tadpoles load but are flagged") {
  const auto doc = testing::fixture("tadpole");
  CHECK(validate(doc.graph).has_tadpoles);
  CHECK_THROWS_AS(require_tadpole_free(doc.graph, "test"), Error);
}

TEST_CASE("theta graph topology") {
  const auto rep = validate(testing::fixture("theta").graph);
  CHECK(rep.euler_number == 1);
  CHECK(rep.gauss_bonnet_ok);
  CHECK(rep.degrees.at("v1") == 3);
}

TEST_CASE("star degree sum") {
  const auto rep = validate(testing::fixture("star3").graph);
  CHECK(rep.degree_sum_ok);
  CHECK(rep.degrees.at("v") == 3);
  CHECK(rep.num_external == 3);
}

TEST_CASE("slot layout") {
  const auto& g = testing::fixture("star_internal").graph;
  // e1 e2 e3 | i1(initial) | i1(terminal)
  CHECK(g.num_slots() == 5);
  CHECK(g.slot_kind(0) == EndKind::External);
  CHECK(g.slot_kind(3) == EndKind::Initial);
  CHECK(g.slot_kind(4) == EndKind::Terminal);
  CHECK(g.partner(3) == std::optional<std::size_t>(4));
  CHECK_FALSE(g.partner(0).has_value());
  CHECK(g.star(0) == std::vector<std::size_t>{0, 1, 3});
  CHECK(g.star(1) == std::vector<std::size_t>{2, 4});
}

TEST_CASE("invalid documents") {
  CHECK(kind_of("{") == ErrorKind::Parse);
  CHECK(kind_of(R"({"vertices":"v"})") == ErrorKind::Parse);
  CHECK(kind_of(R"({"vertices":["a","b"],"internal_edges":[{"id":"i","from":"a","to":"b","length":0}]})") ==
        ErrorKind::Validation);
  CHECK(kind_of(R"({"vertices":["a","b"],"internal_edges":[{"id":"i","from":"a","to":"c","length":1}]})") ==
        ErrorKind::Validation);
  CHECK(kind_of(R"({"vertices":["a","b"]})") == ErrorKind::Validation);
  CHECK(kind_of(R"({"vertices":["a","a"]})") == ErrorKind::Validation);
  CHECK(kind_of(R"({"vertices":["a","b"],"internal_edges":[{"id":"i","from":"a","to":"b","length":1},
                    {"id":"i","from":"a","to":"b","length":2}]})") == ErrorKind::Validation);
  CHECK(kind_of(R"({"vertices":["a","b"],"internal_edges":[{"id":"i","from":"a","to":"b","length":1}],
                    "boundary":{"a":{"type":"robin"}}})") == ErrorKind::Parse);
  CHECK(kind_of(R"({"vertices":["a","b"],"internal_edges":[{"id":"i","from":"a","to":"b","length":1}],
                    "boundary":{"c":{"type":"standard"}}})") == ErrorKind::Validation);
}

TEST_CASE("serialize round trip") {
  for (const char* name : {"theta", "star_internal", "dirichlet_capped", "tadpole", "lasso"}) {
    const auto doc = testing::fixture(name);
    const std::string text = serialize(doc.graph, &doc.boundary);
    const auto again = load_document(text);
    CHECK(serialize(again.graph, &again.boundary) == text);
    CHECK(again.graph.vertices() == doc.graph.vertices());
    for (std::size_t i = 0; i < doc.graph.num_internal(); ++i)
      CHECK(again.graph.internal(i).length == doc.graph.internal(i).length);
  }
}

TEST_CASE("round trip with custom and magnetic boundary data") {
  const char* text = R"({
    "vertices": ["a", "b"],
    "internal_edges": [{"id": "i", "from": "a", "to": "b", "length": 1.5}],
    "external_edges": [{"id": "e", "vertex": "a"}],
    "boundary": {"a": {"type": "custom", "A": [[1, 0], [0, 0]], "B": [[0, 0], [0, [1, 0]]]}},
    "magnetic": {"a": {"e": 0.3, "i": -0.2}, "b": {"i": 1.1}}
  })";
  const auto doc = load_document(text);
  CHECK(doc.boundary.has_magnetic());
  const auto again = load_document(serialize(doc.graph, &doc.boundary));
  const Matrix S1 = assemble_global_scattering(doc.graph, doc.boundary, cplx{2.0, 0.0}).S;
  const Matrix S2 = assemble_global_scattering(again.graph, again.boundary, cplx{2.0, 0.0}).S;
  CHECK(max_abs(S1 - S2) < 1e-14);
}

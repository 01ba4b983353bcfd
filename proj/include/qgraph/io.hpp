#pragma once

#include <filesystem>
#include <string>

#include "qgraph/boundary.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

/// A graph file: the metric graph plus its boundary data. Vertices without a
/// "boundary" entry get standard conditions; "magnetic" phases are applied on
/// top of the per-vertex conditions.
struct GraphDocument {
  MetricGraph graph;
  BoundaryData boundary;
};

/// Parses the graph part of a document. Parse errors (malformed JSON or
/// schema) and validation errors are reported as qgraph::Error.
MetricGraph load_graph(const std::string& text);

GraphDocument load_document(const std::string& text);
GraphDocument load_document_file(const std::filesystem::path& path);

/// Inverse of load_document: ordering of vertices and edges is preserved.
std::string serialize(const MetricGraph& g, const BoundaryData* boundary = nullptr);

}  // namespace qgraph

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgraph/linalg.hpp"

namespace qgraph::cli {

using Json = nlohmann::ordered_json;

Json to_json(cplx z);
Json to_json(const Matrix& m);

/// 17 significant digits, always with a '.' or exponent.
std::string format_double(double x);

/// JSON: the document itself, indented by 2, non-finite floats as null. CSV: the "records" array when present (one
/// column per key of the first record, or `columns` when there are no
/// records), else one key,value row per scalar top-level field.
void write_json(std::ostream& os, const Json& doc);
void write_csv(std::ostream& os, const Json& doc, const std::vector<std::string>& columns = {});

}  // namespace qgraph::cli

#include "report.hpp"

#include <charconv>
#include <cmath>

namespace qgraph::cli {

Json to_json(cplx z) {
  Json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace {

void emit(std::ostream& os, const Json& v, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, val] : v.items()) {
        os << (first ? "" : ",\n") << pad << Json(key).dump() << ": ";
        emit(os, val, depth + 1);
        first = false;
      }
      os << '\n' << close << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i ? ",\n" : "") << pad;
        emit(os, v[i], depth + 1);
      }
      os << '\n' << close << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      os << (std::isfinite(x) ? format_double(x) : "null");
      return;
    }
    default: os << v.dump();
  }
}

}  // namespace

void write_json(std::ostream& os, const Json& doc) {
  emit(os, doc, 0);
  os << '\n';
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string cell(const Json& v) {
  switch (v.type()) {
    case Json::value_t::number_float: return format_double(v.get<double>());
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned: return v.dump();
    case Json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case Json::value_t::string: return quote(v.get<std::string>());
    case Json::value_t::null: return "";
    case Json::value_t::array: {
      bool strings = true;
      for (const auto& e : v) strings = strings && e.is_string();
      if (strings) {
        std::string s;
        for (const auto& e : v) s += (s.empty() ? "" : " ") + e.get<std::string>();
        return quote(s);
      }
      return quote(v.dump());
    }
    default: return quote(v.dump());
  }
}

}  // namespace

void write_csv(std::ostream& os, const Json& doc, const std::vector<std::string>& columns) {
  if (doc.contains("records") && doc["records"].is_array()) {
    const Json& recs = doc["records"];
    std::vector<std::string> keys = columns;
    if (!recs.empty()) {
      keys.clear();
      for (const auto& [key, _] : recs.front().items()) keys.push_back(key);
    }
    std::string header;
    for (const auto& k : keys) header += (header.empty() ? "" : ",") + quote(k);
    os << header << '\n';
    for (const auto& r : recs) {
      std::string line;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i) line += ',';
        line += r.contains(keys[i]) ? cell(r[keys[i]]) : "";
      }
      os << line << '\n';
    }
    return;
  }
  os << "key,value\n";
  for (const auto& [key, v] : doc.items())
    if (!v.is_object() && !(v.is_array() && !v.empty() && v.front().is_object())) os << quote(key) << ',' << cell(v) << '\n';
}

}  // namespace qgraph::cli

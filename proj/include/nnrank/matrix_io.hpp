#pragma once

// Matrix files: CSV (one row per line, decimal or p/q literals, read exactly)
// and JSON {"rows", "cols", "entries" (row-major), "scalar": "rational"|"float"}.

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "nnrank/error.hpp"
#include "nnrank/matrix.hpp"
#include "nnrank/rational.hpp"

namespace nnrank {

using json = nlohmann::json;
using AnyMatrix = std::variant<ExactMatrix, FloatMatrix>;

inline ExactMatrix read_matrix_csv(std::istream& in) {
  std::vector<Rational> entries;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      entries.push_back(parse_rational(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start)));
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) cols = count;
    require(count == cols, ErrorCode::format,
            "ragged CSV: row " + std::to_string(rows + 1) + " has " + std::to_string(count) + " entries, expected " +
                std::to_string(cols));
    ++rows;
  }
  require(rows > 0, ErrorCode::format, "CSV matrix has no rows");
  return ExactMatrix(rows, cols, std::move(entries));
}

inline std::string format_double(double x) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return out.str();
}

inline void write_matrix_csv(std::ostream& out, const ExactMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j).get_str();
    out << '\n';
  }
}

inline void write_matrix_csv(std::ostream& out, const FloatMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

inline json to_json(const ExactMatrix& m) {
  json entries = json::array();
  for (const auto& q : m.entries()) entries.push_back(q.get_str());
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}, {"scalar", "rational"}};
}

inline json to_json(const FloatMatrix& m) {
  json entries = json::array();
  for (double x : m.entries()) entries.push_back(x);
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}, {"scalar", "float"}};
}

inline json to_json(const AnyMatrix& m) {
  return std::visit([](const auto& x) { return to_json(x); }, m);
}

/// Parses the matrix JSON object. `allow_empty` admits 0-sized dimensions (k = 0 witness factors).
inline AnyMatrix matrix_from_json(const json& j, bool allow_empty = false) {
  require(j.is_object(), ErrorCode::format, "matrix JSON must be an object");
  for (const char* key : {"rows", "cols", "entries"})
    require(j.contains(key), ErrorCode::format, std::string("matrix JSON lacks '") + key + "'");
  require(j["rows"].is_number_unsigned() && j["cols"].is_number_unsigned(), ErrorCode::format,
          "matrix dimensions must be nonnegative integers");
  const auto rows = j["rows"].get<std::size_t>();
  const auto cols = j["cols"].get<std::size_t>();
  require(allow_empty || (rows > 0 && cols > 0), ErrorCode::format, "matrix dimensions must be positive");
  const json& entries = j["entries"];
  require(entries.is_array() && entries.size() == rows * cols, ErrorCode::format,
          "matrix JSON entry count does not match rows*cols");
  const std::string scalar = j.value("scalar", std::string("rational"));
  if (scalar == "float") {
    std::vector<double> e;
    e.reserve(entries.size());
    for (const auto& x : entries) {
      require(x.is_number(), ErrorCode::format, "float matrix entries must be numbers");
      const double v = x.get<double>();
      require(std::isfinite(v), ErrorCode::format, "non-finite float entry");
      e.push_back(v);
    }
    return FloatMatrix(rows, cols, std::move(e));
  }
  require(scalar == "rational", ErrorCode::format, "unknown scalar kind '" + scalar + "'");
  std::vector<Rational> e;
  e.reserve(entries.size());
  for (const auto& x : entries) {
    if (x.is_string()) {
      e.push_back(parse_rational(x.get<std::string>()));
    } else if (x.is_number()) {
      e.push_back(parse_rational(x.dump()));
    } else {
      fail(ErrorCode::format, "rational matrix entries must be strings or numbers");
    }
  }
  return ExactMatrix(rows, cols, std::move(e));
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::format, "invalid JSON in '" + origin + "': " + e.what());
  }
}

/// Loads a matrix from a .json file, otherwise from CSV.
inline AnyMatrix load_matrix(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".json") return matrix_from_json(parse_json_text(text, path.string()));
  std::istringstream in(text);
  return read_matrix_csv(in);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write '" + path.string() + "'");
  out << text;
  require(static_cast<bool>(out), ErrorCode::io, "write to '" + path.string() + "' failed");
}

}  // namespace nnrank

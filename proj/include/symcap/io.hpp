#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "symcap/dynamics.hpp"

namespace symcap {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty()) throw IngestError("empty cell", row, col);
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + cell.size()) throw IngestError("non-numeric cell '" + cell + "'", row, col);
  if (!std::isfinite(value)) throw IngestError("non-finite value '" + cell + "'", row, col);
  return value;
}

/// Expected header names x1..xn,p1..pn for 2n columns.
inline bool header_matches(const std::vector<std::string>& fields) {
  const std::size_t cols = fields.size();
  if (cols == 0 || cols % 2 != 0) return false;
  const std::size_t n = cols / 2;
  for (std::size_t i = 0; i < cols; ++i) {
    const std::string want =
        (i < n) ? "x" + std::to_string(i + 1) : "p" + std::to_string(i + 1 - n);
    if (fields[i] != want) return false;
  }
  return true;
}

inline bool looks_numeric(const std::string& cell) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  std::strtod(begin, &end);
  return !cell.empty() && end == begin + cell.size();
}

inline Mat json_to_matrix(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw IngestError(what + " must be a nonempty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j.at(0).is_array() ? j.at(0).size() : 0;
  if (cols == 0) throw IngestError(what + " rows must be nonempty arrays");
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = j.at(r);
    if (!row.is_array() || row.size() != cols) {
      throw IngestError(what + ": ragged row", r + 1);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row.at(c).is_number()) throw IngestError(what + ": non-numeric entry", r + 1, c + 1);
      m(r, c) = row.at(c).get<double>();
      if (!std::isfinite(m(r, c))) throw IngestError(what + ": non-finite entry", r + 1, c + 1);
    }
  }
  return m;
}

inline Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector_to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Vec json_to_vector(const Json& j, const std::string& what) {
  if (!j.is_array()) throw IngestError(what + " must be an array");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j.at(i).is_number()) throw IngestError(what + ": non-numeric entry", i + 1);
    v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  }
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void require_min_rows(int rows, int n) {
  if (rows < 2 * n + 2) {
    throw IngestError("need at least 2n+2 = " + std::to_string(2 * n + 2) +
                      " points, got " + std::to_string(rows));
  }
}

}  // namespace detail

/// Parse a CSV cloud: one row per measurement, columns x1..xn,p1..pn, with
/// an optional single header row naming them exactly.
inline PointCloud parse_cloud_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_csv_row(line));
  }
  if (rows.empty()) throw IngestError("empty cloud file");

  std::size_t first_data = 0;
  bool any_non_numeric = false;
  for (const auto& cell : rows[0]) {
    if (!detail::looks_numeric(cell)) any_non_numeric = true;
  }
  if (any_non_numeric) {
    if (!detail::header_matches(rows[0])) {
      throw IngestError("header must name columns x1..xn,p1..pn in that order", 1);
    }
    first_data = 1;
  }

  const std::size_t cols = rows[0].size();  // header and data rows share the width
  if (cols == 0 || cols % 2 != 0) {
    throw IngestError("number of columns must be even (x1..xn,p1..pn)", 1);
  }
  const int n = static_cast<int>(cols / 2);
  const std::size_t data_rows = rows.size() - first_data;
  Mat points(data_rows, cols);
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw IngestError("ragged row: expected " + std::to_string(cols) + " columns, got " +
                            std::to_string(rows[r].size()),
                        r + 1);
    }
    for (std::size_t c = 0; c < cols; ++c) {
      points(r - first_data, c) = detail::parse_cell(rows[r][c], r + 1, c + 1);
    }
  }
  detail::require_min_rows(static_cast<int>(data_rows), n);
  return PointCloud(n, std::move(points));
}

/// Parse a JSON cloud {"n": int, "points": [[...2n reals...], ...]}.
inline PointCloud parse_cloud_json(const Json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw IngestError("cloud JSON must carry an integer field 'n'");
  }
  const int n = j["n"].get<int>();
  if (n < 1) throw IngestError("cloud JSON: n must be positive");
  if (!j.contains("points")) throw IngestError("cloud JSON must carry 'points'");
  Mat points = detail::json_to_matrix(j["points"], "points");
  if (points.cols() != 2 * n) {
    throw IngestError("cloud JSON: rows must have 2n = " + std::to_string(2 * n) + " entries");
  }
  detail::require_min_rows(static_cast<int>(points.rows()), n);
  return PointCloud(n, std::move(points));
}

/// Load a cloud from disk; JSON when the content starts with '{', CSV
/// otherwise.
inline PointCloud load_cloud(const std::string& path) {
  const std::string text = detail::read_file(path);
  const std::string head = detail::trim(text.substr(0, 64));
  if (!head.empty() && head.front() == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const std::exception& e) {
      throw IngestError(std::string("cloud JSON parse failure: ") + e.what());
    }
    return parse_cloud_json(j);
  }
  return parse_cloud_csv(text);
}

/// Load a form specification {"n": int, "A": [[..]], "B": [[..]], "C": [[..]]}.
inline SymplecticFormSpec load_omega(const std::string& path) {
  Json j;
  try {
    j = Json::parse(detail::read_file(path));
  } catch (const IngestError&) {
    throw;
  } catch (const std::exception& e) {
    throw IngestError(std::string("omega JSON parse failure: ") + e.what());
  }
  for (const char* key : {"n", "A", "B", "C"}) {
    if (!j.contains(key)) throw IngestError(std::string("omega JSON missing field '") + key + "'");
  }
  const int n = j["n"].get<int>();
  const Mat a = detail::json_to_matrix(j["A"], "A");
  const Mat b = detail::json_to_matrix(j["B"], "B");
  const Mat c = detail::json_to_matrix(j["C"], "C");
  if (a.rows() != n || b.rows() != n || c.rows() != n) {
    throw IngestError("omega JSON: blocks must be n x n");
  }
  return build_form(a, b, c);
}

/// Load a precomputed covariance {"n", "sigma", "m0"(, "center")}.
inline EllipsoidEstimate load_sigma(const std::string& path) {
  Json j;
  try {
    j = Json::parse(detail::read_file(path));
  } catch (const IngestError&) {
    throw;
  } catch (const std::exception& e) {
    throw IngestError(std::string("sigma JSON parse failure: ") + e.what());
  }
  for (const char* key : {"n", "sigma", "m0"}) {
    if (!j.contains(key)) throw IngestError(std::string("sigma JSON missing field '") + key + "'");
  }
  const int n = j["n"].get<int>();
  if (n < 1) throw IngestError("sigma JSON: n must be positive");
  const Mat sigma = detail::json_to_matrix(j["sigma"], "sigma");
  if (sigma.rows() != 2 * n || sigma.cols() != 2 * n) {
    throw IngestError("sigma JSON: sigma must be 2n x 2n");
  }
  const double m0 = j["m0"].get<double>();
  Vec center = Vec::Zero(2 * n);
  if (j.contains("center")) {
    center = detail::json_to_vector(j["center"], "center");
    if (center.size() != 2 * n) throw IngestError("sigma JSON: center must have 2n entries");
  }
  return EllipsoidEstimate::from_covariance(PhaseVector(n, center), SymMatrix(sigma), m0);
}

inline Json estimate_to_json(const EllipsoidEstimate& est) {
  Json j;
  j["center"] = detail::vector_to_json(est.center.coords);
  j["sigma"] = detail::matrix_to_json(est.sigma.mat());
  j["m0"] = est.m0;
  j["raw_m2"] = est.raw_m2;
  j["subset"] = est.subset;
  j["volume_proxy"] = est.volume_proxy;
  return j;
}

inline Json report_to_json(const UncertaintyReport& report) {
  Json j;
  j["n"] = report.n;
  j["sigma"] = detail::matrix_to_json(report.sigma.mat());
  j["omega"] = Json{{"A", detail::matrix_to_json(report.omega_spec.block_a())},
                    {"B", detail::matrix_to_json(report.omega_spec.block_b())},
                    {"C", detail::matrix_to_json(report.omega_spec.block_c())}};
  j["min_eig"] = report.min_eig;
  j["psd_ok"] = report.psd_ok;
  Json pairs = Json::array();
  for (const PairInequality& p : report.pairs) {
    pairs.push_back(Json{{"kind", to_string(p.kind)},
                         {"j", p.j},
                         {"k", p.k},
                         {"lhs", p.lhs},
                         {"rhs", p.rhs},
                         {"slack", p.slack},
                         {"holds", p.holds}});
  }
  j["pairs"] = std::move(pairs);
  j["capacity"] = Json{{"value", report.capacity.value},
                       {"threshold", report.capacity.threshold},
                       {"ok", report.capacity.ok},
                       {"reading_largest", report.capacity.reading_largest},
                       {"reading_smallest", report.capacity.reading_smallest}};
  j["spectrum"] = detail::vector_to_json(report.spectrum);
  j["m0"] = report.m0;
  return j;
}

inline UncertaintyReport report_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  SymMatrix sigma(detail::json_to_matrix(j.at("sigma"), "sigma"));
  SymplecticFormSpec spec(detail::json_to_matrix(j.at("omega").at("A"), "A"),
                          detail::json_to_matrix(j.at("omega").at("B"), "B"),
                          detail::json_to_matrix(j.at("omega").at("C"), "C"));
  std::vector<PairInequality> pairs;
  for (const Json& pj : j.at("pairs")) {
    PairInequality p;
    const std::string kind = pj.at("kind").get<std::string>();
    p.kind = kind == "xx"   ? PairInequality::Kind::xx
             : kind == "pp" ? PairInequality::Kind::pp
                            : PairInequality::Kind::xp;
    p.j = pj.at("j").get<int>();
    p.k = pj.at("k").get<int>();
    p.lhs = pj.at("lhs").get<double>();
    p.rhs = pj.at("rhs").get<double>();
    p.slack = pj.at("slack").get<double>();
    p.holds = pj.at("holds").get<bool>();
    pairs.push_back(p);
  }
  CapacityCriterion crit;
  crit.value = j.at("capacity").at("value").get<double>();
  crit.threshold = j.at("capacity").at("threshold").get<double>();
  crit.ok = j.at("capacity").at("ok").get<bool>();
  crit.reading_largest = j.at("capacity").at("reading_largest").get<double>();
  crit.reading_smallest = j.at("capacity").at("reading_smallest").get<double>();
  return UncertaintyReport{n,
                           std::move(sigma),
                           std::move(spec),
                           j.at("m0").get<double>(),
                           j.at("min_eig").get<double>(),
                           j.at("psd_ok").get<bool>(),
                           std::move(pairs),
                           crit,
                           detail::json_to_vector(j.at("spectrum"), "spectrum")};
}

inline EllipsoidEstimate estimate_from_json(const Json& j, int n) {
  EllipsoidEstimate est{PhaseVector(n, detail::json_to_vector(j.at("center"), "center")),
                        SymMatrix(detail::json_to_matrix(j.at("sigma"), "sigma")),
                        j.at("m0").get<double>(),
                        j.at("raw_m2").get<double>(),
                        j.at("subset").get<std::vector<int>>(),
                        j.at("volume_proxy").get<double>()};
  return est;
}

inline Json flow_table_to_json(const std::vector<FlowSample>& rows) {
  Json out = Json::array();
  for (const FlowSample& r : rows) {
    out.push_back(Json{{"t", r.t},
                       {"capacity", r.capacity},
                       {"psd_ok", r.psd_ok},
                       {"capacity_ok", r.capacity_ok}});
  }
  return out;
}

}  // namespace symcap

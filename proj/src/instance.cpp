#include "fpdot/instance.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fpdot {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<double> number_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError("\"" + field + "\" must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) {
      throw ParseError("\"" + field + "\" entry " + std::to_string(out.size()) +
                       " is not a number");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

Matrix number_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("\"" + field + "\" must be a non-empty array of rows");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    rows.push_back(number_array(j[i], field + " row " + std::to_string(i)));
    if (rows.back().size() != rows.front().size()) {
      throw ParseError("\"" + field + "\" row " + std::to_string(i) + " has length " +
                       std::to_string(rows.back().size()) + ", expected " +
                       std::to_string(rows.front().size()));
    }
  }
  return Matrix::from_rows(rows);
}

ReferenceDensity parse_reference(const json& j, const DiscreteDensity& mu,
                                 const DiscreteDensity& nu) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ParseError("\"reference\" must be an object with a string \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "uniform") return ReferenceDensity::uniform();
  if (kind == "product") return ReferenceDensity::product_of_marginals(mu, nu);
  if (kind == "matrix") {
    if (!j.contains("matrix")) {
      throw ParseError("\"reference\" of kind \"matrix\" needs a \"matrix\" field");
    }
    return ReferenceDensity::explicit_matrix(number_matrix(j["matrix"], "reference.matrix"));
  }
  throw ParseError("unknown reference kind \"" + kind + "\"");
}

MomentConstraint parse_moment(const json& j) {
  if (!j.is_object() || !j.contains("chi") || !j.contains("eta")) {
    throw ParseError("\"moment\" must be an object with \"chi\" and \"eta\"");
  }
  if (!j["eta"].is_number()) throw ParseError("\"moment.eta\" must be a number");
  return MomentConstraint(number_matrix(j["chi"], "moment.chi"),
                          j["eta"].get<double>());
}

void check_shape(const Matrix& m, std::size_t n_rows, std::size_t n_cols,
                 const char* what) {
  if (m.rows() != n_rows || m.cols() != n_cols) {
    throw DimensionMismatch(std::string(what) + " is " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()) + ", marginals imply " +
                            std::to_string(n_rows) + "x" + std::to_string(n_cols));
  }
}

}  // namespace

ProblemInstance parse_instance(const std::string& path) {
  json j = load_json(path);
  if (!j.is_object()) throw ParseError(path + ": top level must be an object");
  for (const char* required : {"mu", "nu", "cost"}) {
    if (!j.contains(required)) {
      throw ParseError(path + ": missing required field \"" + required + "\"");
    }
  }
  DiscreteDensity mu(number_array(j["mu"], "mu"));
  DiscreteDensity nu(number_array(j["nu"], "nu"));
  Matrix cost_entries = number_matrix(j["cost"], "cost");
  check_shape(cost_entries, mu.size(), nu.size(), "cost");
  CostMatrix cost(std::move(cost_entries));

  std::optional<double> epsilon;
  if (j.contains("epsilon")) {
    if (!j["epsilon"].is_number()) throw ParseError("\"epsilon\" must be a number");
    epsilon = j["epsilon"].get<double>();
  }

  ReferenceDensity reference = ReferenceDensity::uniform();
  if (j.contains("reference")) reference = parse_reference(j["reference"], mu, nu);
  // Materializing here surfaces a reference/marginal shape conflict at parse
  // time rather than mid-solve.
  (void)reference.materialize(mu.size(), nu.size());

  std::optional<MomentConstraint> moment;
  if (j.contains("moment")) {
    moment = parse_moment(j["moment"]);
    check_shape(moment->chi(), mu.size(), nu.size(), "moment matrix");
  }

  return ProblemInstance{std::move(mu),     std::move(nu), std::move(cost),
                         epsilon,           reference,     std::move(moment)};
}

ProblemInstance instance_from_cost_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      std::size_t end = comma == std::string::npos ? line.size() : comma;
      std::size_t lo = start, hi = end;
      while (lo < hi && std::isspace(static_cast<unsigned char>(line[lo]))) ++lo;
      while (hi > lo && std::isspace(static_cast<unsigned char>(line[hi - 1]))) --hi;
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + lo, line.data() + hi, value);
      if (ec != std::errc{} || ptr != line.data() + hi) {
        throw ParseError(path + " row " + std::to_string(rows.size()) +
                         ": cannot parse \"" + line.substr(start, end - start) + "\"");
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path + " row " + std::to_string(rows.size()) + " has " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + " holds no rows");

  const std::size_t n = rows.size(), m = rows.front().size();
  DiscreteDensity mu(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  DiscreteDensity nu(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  return ProblemInstance{std::move(mu),
                         std::move(nu),
                         CostMatrix(Matrix::from_rows(rows)),
                         std::nullopt,
                         ReferenceDensity::uniform(),
                         std::nullopt};
}

Matrix load_matrix_file(const std::string& path) {
  return number_matrix(load_json(path), path);
}

}  // namespace fpdot

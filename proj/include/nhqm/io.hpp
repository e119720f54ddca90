// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>
#include "json.hpp"
#include "nhqm/density.hpp"
#include "nhqm/error.hpp"
#include "nhqm/linalg.hpp"
#include "nhqm/nogo.hpp"

namespace nhqm::io
{

using json = nlohmann::ordered_json;

// Complex numbers are [re, im]; plain numbers are accepted as real on input.
inline json to_json(cplx z)
{
  return json::array({z.real(), z.imag()});
}

inline cplx complex_from_json(const json &j, const std::string &field)
{
  if (j.is_number())
    return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ValidationError(field, "expected a number or an [re, im] pair");
}

inline json to_json(const Matrix &M)
{
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
  {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k)
      row.push_back(to_json(M(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Vector &v)
{
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(to_json(v(i)));
  return out;
}

inline Matrix matrix_from_json(const json &j, const std::string &field)
{
  if (!j.is_array() || j.empty())
    throw ValidationError(field, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
  {
    const auto &row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ValidationError(field, "matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k)
      M(i, k) = complex_from_json(row[static_cast<std::size_t>(k)],
                                  field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  if (!M.allFinite())
    throw ValidationError(field, "entries must be finite");
  return M;
}

inline Vector vector_from_json(const json &j, const std::string &field)
{
  if (!j.is_array() || j.empty())
    throw ValidationError(field, "expected a non-empty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], field + "[" + std::to_string(i) + "]");
  if (!v.allFinite())
    throw ValidationError(field, "entries must be finite");
  return v;
}

inline json to_json(const GeneralizedDensityMatrix &g)
{
  json j;
  j["dim_a"] = g.dim_a;
  j["dim_b"] = g.dim_b;
  j["rho"] = to_json(g.rho);
  j["metric"] = to_json(g.metric);
  return j;
}

inline GeneralizedDensityMatrix gdm_from_json(const json &j)
{
  for (const auto &[key, value] : j.items())
    if (key != "dim_a" && key != "dim_b" && key != "rho" && key != "metric")
      throw ValidationError(key, "unknown key");
  for (const char *key : {"dim_a", "dim_b", "rho", "metric"})
    if (!j.contains(key))
      throw ValidationError(key, "required");
  GeneralizedDensityMatrix g;
  g.dim_a = j["dim_a"].get<Eigen::Index>();
  g.dim_b = j["dim_b"].get<Eigen::Index>();
  g.rho = matrix_from_json(j["rho"], "rho");
  g.metric = matrix_from_json(j["metric"], "metric");
  if (g.rho.rows() != g.metric.rows())
    throw ValidationError("metric", "dimension differs from rho");
  check_dims(g.rho.rows(), g.dim_a, g.dim_b, "gdm_from_json");
  require_hpd(g.metric, "gdm_from_json metric");
  return g;
}

inline json to_json(const NoGoReport &r)
{
  json j;
  j["theorem"] = to_string(r.theorem);
  if (!r.variant.empty())
    j["variant"] = r.variant;
  j["trials"] = r.trials;
  j["max_residual"] = r.max_residual;
  j["tolerance"] = r.tolerance;
  j["verdict"] = r.verdict ? "pass" : "fail";
  j["seed"] = r.seed;
  json controls = json::array();
  for (const auto &c : r.controls)
    controls.push_back({{"name", c.name}, {"value", c.value}, {"note", c.note}});
  j["controls"] = std::move(controls);
  return j;
}

// 1-based line of a byte offset into text.
inline std::size_t line_of(const std::string &text, std::size_t byte)
{
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n')
      ++line;
  return line;
}

inline json parse_json(const std::string &text)
{
  try
  {
    return json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    throw ParseError(line_of(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
}

}  // namespace nhqm::io

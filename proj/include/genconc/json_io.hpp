#pragma once

// JSON interchange formats. A complex scalar is a two-element array
// [re, im]; matrices are arrays of rows.
//
//   pure state     {"n": N, "a": [[z, ...], ...]}
//   density matrix {"dim": M, "m": [[z, ...], ...]}
//   ensemble       {"states": [[z, ...], ...]}
//   recursive      {"k": k, "base": {"a": z, "c": z, "d": z}, "ladder": [[z, z], ...]}
//   sym            {"family": "sym", "a1": z, "b1": z, "c1": z, "d1": z, "b": z, "e": z}

#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"

#include "genconc/dcomputable.hpp"
#include "genconc/states.hpp"

namespace genconc::json_io {

using nlohmann::json;

[[noreturn]] inline void bad(const std::string& what) { fail(ErrorKind::Validation, "json: " + what); }

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad("complex scalar must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const ComplexVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline ComplexVector vector_from_json(const json& j) {
  if (!j.is_array()) bad("vector must be an array");
  ComplexVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline json to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) out.push_back(to_json(ComplexVector(m.row(r).transpose())));
  return out;
}

inline ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) bad("matrix must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  ComplexMatrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad("matrix rows have different lengths");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = complex_from_json(j[r][c]);
    }
  }
  return m;
}

inline json to_json(const PureState& psi) {
  return {{"n", psi.n()}, {"a", to_json(psi.amplitudes())}};
}

inline PureState pure_from_json(const json& j, bool normalize = false) {
  if (!j.is_object() || !j.contains("a")) bad("pure state needs field \"a\"");
  const ComplexMatrix a = matrix_from_json(j.at("a"));
  if (j.contains("n") && j.at("n").get<Index>() != a.rows()) bad("\"n\" does not match \"a\"");
  return make_pure(a, normalize);
}

inline json to_json(const DensityMatrix& rho) {
  return {{"dim", rho.dim()}, {"m", to_json(rho.matrix())}};
}

inline DensityMatrix density_from_json(const json& j) {
  if (!j.is_object() || !j.contains("m")) bad("density matrix needs field \"m\"");
  const ComplexMatrix m = matrix_from_json(j.at("m"));
  if (j.contains("dim") && j.at("dim").get<Index>() != m.rows()) bad("\"dim\" does not match \"m\"");
  return make_density(m);
}

inline json to_json(const Ensemble& e) {
  json states = json::array();
  for (const auto& s : e.states) states.push_back(to_json(s));
  return {{"states", states}};
}

inline Ensemble ensemble_from_json(const json& j) {
  if (!j.is_object() || !j.contains("states") || !j.at("states").is_array()) {
    bad("ensemble needs array field \"states\"");
  }
  Ensemble e;
  for (const auto& s : j.at("states")) e.states.push_back(vector_from_json(s));
  return e;
}

inline json to_json(const DComputableParams& p) {
  json ladder = json::array();
  for (const auto& [b, c] : p.ladder) ladder.push_back(json::array({to_json(b), to_json(c)}));
  return {{"family", "recursive"},
          {"k", p.k},
          {"base", {{"a", to_json(p.a)}, {"c", to_json(p.c)}, {"d", to_json(p.d)}}},
          {"ladder", ladder}};
}

inline DComputableParams params_from_json(const json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("base") || !j.contains("ladder")) {
    bad("recursive parameters need \"k\", \"base\" and \"ladder\"");
  }
  DComputableParams p;
  p.k = j.at("k").get<int>();
  const json& base = j.at("base");
  p.a = complex_from_json(base.at("a"));
  p.c = complex_from_json(base.at("c"));
  p.d = complex_from_json(base.at("d"));
  for (const auto& rung : j.at("ladder")) {
    if (!rung.is_array() || rung.size() != 2) bad("ladder entries must be [b, c] pairs");
    p.ladder.emplace_back(complex_from_json(rung[0]), complex_from_json(rung[1]));
  }
  validate(p);
  return p;
}

inline json to_json(const SymFamilyParams& p) {
  return {{"family", "sym"}, {"a1", to_json(p.a1)}, {"b1", to_json(p.b1)},
          {"c1", to_json(p.c1)}, {"d1", to_json(p.d1)}, {"b", to_json(p.b)},
          {"e", to_json(p.e)}};
}

inline SymFamilyParams sym_params_from_json(const json& j) {
  const auto get = [&](const char* key) {
    return j.contains(key) ? complex_from_json(j.at(key)) : Complex{};
  };
  return {get("a1"), get("b1"), get("c1"), get("d1"), get("b"), get("e")};
}

using AnyParams = std::variant<DComputableParams, SymFamilyParams>;

inline AnyParams any_params_from_json(const json& j) {
  if (!j.is_object()) bad("parameters must be an object");
  if (j.value("family", std::string("recursive")) == "sym") return sym_params_from_json(j);
  return params_from_json(j);
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

}  // namespace genconc::json_io

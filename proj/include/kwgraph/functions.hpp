#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "kwgraph/errors.hpp"
#include "kwgraph/exhaustion.hpp"
#include "kwgraph/graph.hpp"
#include "kwgraph/vertex_function.hpp"

namespace kwg {

enum class Preset { constant, geometric, power, table };

// Function-spec document:
//   {"preset":"const","params":{"c":v}}
//   {"preset":"geom", "params":{"a":a,"r":r}}      a r^n
//   {"preset":"power","params":{"a":a,"p":p}}      a (1+n)^(-p)
//   {"preset":"table","params":{"values":{id:v,...},"default":v}}
// where n is the graph distance to the exhaustion root.
struct FunctionSpec {
  Preset preset = Preset::constant;
  double a = 0.0;
  double r = 1.0;
  double p = 0.0;
  std::map<std::string, double> table;
  std::optional<double> table_default;

  static FunctionSpec constant(double c) { return make(Preset::constant, c, 1.0, 0.0); }
  static FunctionSpec geometric(double a, double r) { return make(Preset::geometric, a, r, 0.0); }
  static FunctionSpec power(double a, double p) { return make(Preset::power, a, 1.0, p); }

  bool radial() const { return preset != Preset::table; }

  double at_radius(int n) const {
    switch (preset) {
      case Preset::constant: return a;
      case Preset::geometric: return a * std::pow(r, n);
      case Preset::power: return a * std::pow(1.0 + n, -p);
      case Preset::table: break;
    }
    throw DomainError("table functions are not radial");
  }

  double at(const std::string& id, int n) const {
    if (preset != Preset::table) return at_radius(n);
    auto it = table.find(id);
    if (it != table.end()) return it->second;
    if (table_default) return *table_default;
    throw SpecError("table function has no value for vertex '" + id + "' and no default");
  }

  // Supremum over all radii n >= 0; for tables, over the listed values.
  double supremum() const {
    switch (preset) {
      case Preset::constant: return a;
      case Preset::geometric:
        if (r < 1.0) return a >= 0.0 ? a : 0.0;
        return a >= 0.0 ? (r > 1.0 ? INFINITY : a) : a;
      case Preset::power:
        if (p > 0.0) return a >= 0.0 ? a : 0.0;
        return a >= 0.0 ? (p < 0.0 ? INFINITY : a) : a;
      case Preset::table: {
        double s = table_default.value_or(-INFINITY);
        for (const auto& [id, v] : table) s = std::max(s, v);
        return s;
      }
    }
    return INFINITY;
  }

  bool operator==(const FunctionSpec&) const = default;

 private:
  static FunctionSpec make(Preset preset, double a, double r, double p) {
    FunctionSpec s;
    s.preset = preset;
    s.a = a;
    s.r = r;
    s.p = p;
    return s;
  }
};

inline FunctionSpec parse_function_spec(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("preset") || !j.at("preset").is_string())
    throw SpecError("function spec needs a string 'preset'");
  const std::string preset = j.at("preset").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  auto num = [&](const char* key) {
    if (!params.contains(key) || !params.at(key).is_number())
      throw SpecError("function preset '" + preset + "' needs numeric parameter '" + key + "'");
    return params.at(key).get<double>();
  };
  FunctionSpec s;
  if (preset == "const") {
    s = FunctionSpec::constant(num("c"));
  } else if (preset == "geom") {
    s = FunctionSpec::geometric(num("a"), num("r"));
    if (!(s.r > 0.0)) throw SpecError("geom preset needs r > 0");
  } else if (preset == "power") {
    s = FunctionSpec::power(num("a"), num("p"));
  } else if (preset == "table") {
    s.preset = Preset::table;
    if (!params.contains("values") || !params.at("values").is_object())
      throw SpecError("table preset needs an object 'values'");
    for (const auto& [id, v] : params.at("values").items()) {
      if (!v.is_number()) throw SpecError("table value for '" + id + "' is not a number");
      s.table[id] = v.get<double>();
    }
    if (params.contains("default")) s.table_default = num("default");
  } else {
    throw SpecError("unknown function preset '" + preset + "'");
  }
  return s;
}

inline nlohmann::json function_spec_to_json(const FunctionSpec& s) {
  switch (s.preset) {
    case Preset::constant: return {{"preset", "const"}, {"params", {{"c", s.a}}}};
    case Preset::geometric: return {{"preset", "geom"}, {"params", {{"a", s.a}, {"r", s.r}}}};
    case Preset::power: return {{"preset", "power"}, {"params", {{"a", s.a}, {"p", s.p}}}};
    case Preset::table: {
      nlohmann::json params = {{"values", s.table}};
      if (s.table_default) params["default"] = *s.table_default;
      return {{"preset", "table"}, {"params", params}};
    }
  }
  return {};
}

// Evaluates a function spec on every vertex of the graph, with radii taken
// from the exhaustion root.
inline VertexFunction realize(const MeasuredGraph& g, const Exhaustion& ex, const FunctionSpec& s) {
  VertexFunction f(g.size());
  const auto& dist = ex.distance();
  for (VertexIndex x = 0; x < g.size(); ++x) f.set(x, s.at(g.id(x), dist[x]));
  return f;
}

}  // namespace kwg

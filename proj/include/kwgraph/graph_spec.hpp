#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "kwgraph/generators.hpp"
#include "kwgraph/graph.hpp"

namespace kwg {

namespace detail {

// Vertex ids may be given as strings, integers or integer tuples; all are
// normalised to the string form used by the generators.
inline std::string vertex_id_from_json(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_array()) {
    std::vector<long long> c;
    for (const auto& e : j) {
      if (!e.is_number_integer()) throw SpecError("vertex id tuples must hold integers");
      c.push_back(e.get<long long>());
    }
    return join_coords(c);
  }
  throw SpecError("vertex id must be a string, integer or integer tuple");
}

inline double positive_number(const nlohmann::json& j, const char* what) {
  if (!j.is_number()) throw SpecError(std::string(what) + " must be a number");
  return j.get<double>();
}

template <typename T>
T param_or(const nlohmann::json& params, const char* key, T fallback) {
  if (!params.contains(key)) return fallback;
  try {
    return params.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SpecError(std::string("parameter '") + key + "' has the wrong type");
  }
}

inline MeasuredGraph explicit_graph(const nlohmann::json& spec) {
  if (!spec.contains("vertices") || !spec.at("vertices").is_array())
    throw SpecError("explicit graph spec needs a 'vertices' array");
  GraphBuilder b;
  std::vector<std::pair<std::string, long long>> declared;
  for (const auto& v : spec.at("vertices")) {
    if (!v.is_object() || !v.contains("id")) throw SpecError("vertex entries need an 'id'");
    std::string id = vertex_id_from_json(v.at("id"));
    double mu = v.contains("mu") ? positive_number(v.at("mu"), "mu") : 1.0;
    if (v.contains("degree")) {
      const auto& d = v.at("degree");
      if (!d.is_number_integer() || d.get<long long>() < 0)
        throw SpecError("vertex '" + id + "' declares a non-finite degree");
      declared.emplace_back(id, d.get<long long>());
    }
    b.add_vertex(id, mu);
  }
  if (spec.contains("edges")) {
    if (!spec.at("edges").is_array()) throw SpecError("'edges' must be an array");
    for (const auto& e : spec.at("edges")) {
      if (!e.is_object() || !e.contains("u") || !e.contains("v"))
        throw SpecError("edge entries need 'u' and 'v'");
      double w = e.contains("w") ? positive_number(e.at("w"), "w") : 1.0;
      b.add_edge(vertex_id_from_json(e.at("u")), vertex_id_from_json(e.at("v")), w);
    }
  }
  MeasuredGraph g = std::move(b).build();
  for (const auto& [id, deg] : declared) {
    if (static_cast<long long>(g.neighbors(g.index_of(id)).size()) != deg)
      throw SpecError("vertex '" + id + "' declares degree " + std::to_string(deg) +
                      " but has " + std::to_string(g.neighbors(g.index_of(id)).size()) + " neighbours");
  }
  return g;
}

}  // namespace detail

// Parses a graph-spec document: either an explicit vertex/edge list or a
// generator {"family", "params", "truncation_depth"}.
inline MeasuredGraph build_graph(const nlohmann::json& spec) {
  if (!spec.is_object()) throw SpecError("graph spec must be a JSON object");
  if (!spec.contains("family")) return detail::explicit_graph(spec);

  if (!spec.at("family").is_string()) throw SpecError("'family' must be a string");
  const std::string family = spec.at("family").get<std::string>();
  const nlohmann::json params = spec.value("params", nlohmann::json::object());
  if (!spec.contains("truncation_depth") || !spec.at("truncation_depth").is_number_integer())
    throw SpecError("generator spec needs an integer 'truncation_depth'");
  const int depth = spec.at("truncation_depth").get<int>();

  if (family == "lattice") return make_lattice(detail::param_or(params, "dim", 1), depth);
  if (family == "tree") return make_tree(detail::param_or(params, "degree", 3), depth);
  if (family == "path") return make_path(depth);
  if (family == "collapsing_chain")
    return make_collapsing_chain(detail::param_or(params, "ratio", 0.5), depth);
  throw SpecError("unknown graph family '" + family + "'");
}

}  // namespace kwg

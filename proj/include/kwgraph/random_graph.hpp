#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "kwgraph/graph.hpp"

namespace kwg {

struct RandomGraphOptions {
  std::size_t min_vertices = 2;
  std::size_t max_vertices = 50;
  double extra_edge_probability = 0.1;
  double mu_min = 0.1, mu_max = 5.0;
  double w_min = 0.1, w_max = 5.0;
};

// Connected graph: a random spanning tree plus independent extra edges.
// Vertex ids are "v0", "v1", ...
inline MeasuredGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& o = {}) {
  std::uniform_int_distribution<std::size_t> size(o.min_vertices, o.max_vertices);
  std::uniform_real_distribution<double> mu(o.mu_min, o.mu_max), w(o.w_min, o.w_max), coin(0.0, 1.0);
  const std::size_t n = size(rng);
  GraphBuilder b;
  auto name = [](std::size_t i) { return "v" + std::to_string(i); };
  for (std::size_t i = 0; i < n; ++i) b.add_vertex(name(i), mu(rng));
  std::set<std::pair<std::size_t, std::size_t>> tree;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    const std::size_t p = parent(rng);
    tree.emplace(p, i);
    b.add_edge(name(p), name(i), w(rng));
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng) < o.extra_edge_probability && !tree.count({i, j})) b.add_edge(name(i), name(j), w(rng));
  return std::move(b).build();
}

}  // namespace kwg

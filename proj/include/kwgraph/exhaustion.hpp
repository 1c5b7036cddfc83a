#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "kwgraph/graph.hpp"

namespace kwg {

// One exhaustion level V_k with its boundary and closure. All vertex lists
// are sorted by graph index, i.e. canonical order.
struct Level {
  int k = 0;
  std::vector<VertexIndex> vertices;  // V_k
  std::vector<VertexIndex> boundary;  // vertices outside V_k adjacent to V_k
  std::vector<VertexIndex> closure;   // V_k united with the boundary
  std::vector<std::ptrdiff_t> local;  // graph index -> position in vertices, or -1

  std::size_t size() const { return vertices.size(); }
  bool contains(VertexIndex x) const { return x < local.size() && local[x] >= 0; }
  std::size_t position(VertexIndex x) const {
    if (!contains(x)) throw DomainError("vertex is outside level " + std::to_string(k));
    return static_cast<std::size_t>(local[x]);
  }
};

// Builds a level from an arbitrary finite vertex set. Every vertex of the set
// must have complete neighbour data so that the boundary is fully known.
inline Level make_level(const MeasuredGraph& g, int k, std::vector<VertexIndex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  Level lv;
  lv.k = k;
  lv.local.assign(g.size(), -1);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] >= g.size()) throw DomainError("level vertex out of range");
    if (!g.complete(vertices[i]))
      throw DomainError("level " + std::to_string(k) + " reaches the truncation shell at '" +
                        g.id(vertices[i]) + "'");
    lv.local[vertices[i]] = static_cast<std::ptrdiff_t>(i);
  }
  std::vector<unsigned char> mark(g.size(), 0);
  for (VertexIndex x : vertices)
    for (VertexIndex y : g.neighbors(x))
      if (lv.local[y] < 0 && !mark[y]) {
        mark[y] = 1;
        lv.boundary.push_back(y);
      }
  std::sort(lv.boundary.begin(), lv.boundary.end());
  lv.closure.reserve(vertices.size() + lv.boundary.size());
  std::merge(vertices.begin(), vertices.end(), lv.boundary.begin(), lv.boundary.end(),
             std::back_inserter(lv.closure));
  lv.vertices = std::move(vertices);
  return lv;
}

// Nested levels V_1, ..., V_K; immutable after construction.
class Exhaustion {
 public:
  Exhaustion(VertexIndex root, std::vector<int> distance, std::vector<Level> levels)
      : root_(root), distance_(std::move(distance)), levels_(std::move(levels)) {}

  VertexIndex root() const { return root_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  const Level& level(int k) const {
    if (k < 1 || k > depth())
      throw DomainError("exhaustion level " + std::to_string(k) + " not available");
    return levels_[static_cast<std::size_t>(k - 1)];
  }
  const std::vector<Level>& levels() const { return levels_; }
  // Graph distance from the root, for every vertex of the graph.
  const std::vector<int>& distance() const { return distance_; }

 private:
  VertexIndex root_;
  std::vector<int> distance_;
  std::vector<Level> levels_;
};

// V_k = closed BFS ball of radius k about root, for k = 1..depth_max.
inline Exhaustion ball_exhaustion(const MeasuredGraph& g, VertexIndex root, int depth_max) {
  if (root >= g.size()) throw DomainError("exhaustion root is not a vertex of the graph");
  if (depth_max < 1) throw DomainError("exhaustion depth must be positive");
  std::vector<int> dist = bfs_distances(g, root);
  std::vector<Level> levels;
  levels.reserve(static_cast<std::size_t>(depth_max));
  for (int k = 1; k <= depth_max; ++k) {
    std::vector<VertexIndex> ball;
    for (VertexIndex x = 0; x < g.size(); ++x)
      if (dist[x] <= k) ball.push_back(x);
    try {
      levels.push_back(make_level(g, k, std::move(ball)));
    } catch (const DomainError&) {
      throw DomainError("exhaustion depth " + std::to_string(depth_max) +
                        " exceeds the generated truncation (level " + std::to_string(k) +
                        " needs vertices beyond it)");
    }
  }
  return Exhaustion(root, std::move(dist), std::move(levels));
}

inline Exhaustion ball_exhaustion(const MeasuredGraph& g, std::string_view root, int depth_max) {
  auto x = g.find(root);
  if (!x) throw DomainError("exhaustion root '" + std::string(root) + "' is not a vertex");
  return ball_exhaustion(g, *x, depth_max);
}

}  // namespace kwg

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kwgraph/errors.hpp"

namespace kwg {

using VertexIndex = std::size_t;

enum class Family { lattice, tree, path, collapsing_chain };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::lattice: return "lattice";
    case Family::tree: return "tree";
    case Family::path: return "path";
    case Family::collapsing_chain: return "collapsing_chain";
  }
  return "?";
}

// Describes the infinite graph a truncation was cut from. The conditions
// module uses it for closed-form tail sums over the part that was not
// generated.
struct FamilyTag {
  Family family = Family::lattice;
  int dimension = 1;    // lattice
  int degree = 3;       // tree
  double ratio = 0.5;   // collapsing_chain, mu(x) = ratio^|x|
  int truncation_depth = 0;

  bool operator==(const FamilyTag&) const = default;
};

// Connected, locally finite graph with vertex measure mu and symmetric edge
// weights w. Vertices are stored in canonical order (lexicographic on the
// coordinate key, then on the id), adjacency in CSR form with neighbours in
// ascending index order. Immutable once built.
//
// A truncated infinite family marks its outermost shell as incomplete: those
// vertices exist but some of their neighbours were not generated.
class MeasuredGraph {
 public:
  std::size_t size() const { return ids_.size(); }
  std::size_t edge_count() const { return adjacency_.size() / 2; }

  const std::string& id(VertexIndex x) const { return ids_.at(x); }
  double mu(VertexIndex x) const { return mu_[x]; }
  bool complete(VertexIndex x) const { return complete_[x] != 0; }

  std::span<const VertexIndex> neighbors(VertexIndex x) const {
    return {adjacency_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }
  std::span<const double> weights(VertexIndex x) const {
    return {weights_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }

  // Sum of w_xy over the known neighbours of x.
  double weighted_degree(VertexIndex x) const {
    auto ws = weights(x);
    return std::accumulate(ws.begin(), ws.end(), 0.0);
  }

  // w_xy, or 0 when x and y are not adjacent.
  double weight(VertexIndex x, VertexIndex y) const {
    auto ns = neighbors(x);
    auto it = std::lower_bound(ns.begin(), ns.end(), y);
    if (it == ns.end() || *it != y) return 0.0;
    return weights(x)[static_cast<std::size_t>(it - ns.begin())];
  }

  std::optional<VertexIndex> find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  VertexIndex index_of(std::string_view id) const {
    if (auto x = find(id)) return *x;
    throw DomainError("unknown vertex '" + std::string(id) + "'");
  }

  const std::optional<FamilyTag>& family() const { return family_; }
  std::optional<VertexIndex> origin() const { return origin_; }
  bool finite() const { return !family_.has_value(); }

 private:
  friend class GraphBuilder;

  std::vector<std::string> ids_;
  std::vector<double> mu_;
  std::vector<unsigned char> complete_;
  std::vector<std::size_t> offsets_;
  std::vector<VertexIndex> adjacency_;
  std::vector<double> weights_;
  std::unordered_map<std::string, VertexIndex> index_;
  std::optional<FamilyTag> family_;
  std::optional<VertexIndex> origin_;
};

// Collects vertices and undirected edges, then validates and canonicalises.
class GraphBuilder {
 public:
  void add_vertex(std::string id, double mu, std::vector<long long> key = {}) {
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw SpecError("vertex '" + id + "' has non-positive measure");
    if (slot_.count(id)) throw SpecError("duplicate vertex '" + id + "'");
    slot_.emplace(id, vertices_.size());
    vertices_.push_back({std::move(id), mu, std::move(key), true});
  }

  // Undirected edge {u, v}. Listing the same pair twice is allowed only with
  // the same weight.
  void add_edge(std::string_view u, std::string_view v, double w) {
    std::size_t a = slot(u), b = slot(v);
    if (a == b) throw SpecError("self-loop at '" + std::string(u) + "'");
    if (!(w > 0.0) || !std::isfinite(w))
      throw SpecError("edge {" + std::string(u) + "," + std::string(v) +
                      "} has non-positive weight");
    auto key = std::minmax(a, b);
    auto [it, inserted] = edges_.emplace(std::pair{key.first, key.second}, w);
    if (!inserted && it->second != w)
      throw SpecError("asymmetric edge weights on {" + std::string(u) + "," +
                      std::string(v) + "}");
  }

  void mark_incomplete(std::string_view id) { vertices_[slot(id)].complete = false; }

  void set_family(FamilyTag tag, std::string origin) {
    family_ = tag;
    origin_ = std::move(origin);
  }

  MeasuredGraph build() && {
    const std::size_t n = vertices_.size();
    if (n == 0) throw SpecError("graph has no vertices");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& va = vertices_[a];
      const auto& vb = vertices_[b];
      if (va.key != vb.key) return va.key < vb.key;
      return va.id < vb.id;
    });
    std::vector<VertexIndex> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

    MeasuredGraph g;
    g.ids_.resize(n);
    g.mu_.resize(n);
    g.complete_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& v = vertices_[order[i]];
      g.ids_[i] = v.id;
      g.mu_[i] = v.mu;
      g.complete_[i] = v.complete ? 1 : 0;
      g.index_.emplace(v.id, i);
    }

    std::vector<std::vector<std::pair<VertexIndex, double>>> adj(n);
    for (const auto& [pair, w] : edges_) {
      VertexIndex a = rank[pair.first], b = rank[pair.second];
      adj[a].emplace_back(b, w);
      adj[b].emplace_back(a, w);
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(adj[i].begin(), adj[i].end());
      g.offsets_[i + 1] = g.offsets_[i] + adj[i].size();
      for (auto [y, w] : adj[i]) {
        g.adjacency_.push_back(y);
        g.weights_.push_back(w);
      }
    }

    // Connectivity by BFS from vertex 0.
    std::vector<unsigned char> seen(n, 0);
    std::queue<VertexIndex> queue;
    queue.push(0);
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
      VertexIndex x = queue.front();
      queue.pop();
      for (VertexIndex y : g.neighbors(x))
        if (!seen[y]) {
          seen[y] = 1;
          ++reached;
          queue.push(y);
        }
    }
    if (reached != n) throw SpecError("graph is not connected");

    g.family_ = family_;
    if (origin_) g.origin_ = g.index_of(*origin_);
    return g;
  }

 private:
  struct PendingVertex {
    std::string id;
    double mu;
    std::vector<long long> key;
    bool complete;
  };

  std::size_t slot(std::string_view id) const {
    auto it = slot_.find(std::string(id));
    if (it == slot_.end()) throw SpecError("edge refers to unknown vertex '" + std::string(id) + "'");
    return it->second;
  }

  std::vector<PendingVertex> vertices_;
  std::unordered_map<std::string, std::size_t> slot_;
  std::map<std::pair<std::size_t, std::size_t>, double> edges_;
  std::optional<FamilyTag> family_;
  std::optional<std::string> origin_;
};

// Graph distances from root over the known part of the graph; unreachable
// entries cannot occur since graphs are connected.
inline std::vector<int> bfs_distances(const MeasuredGraph& g, VertexIndex root) {
  std::vector<int> dist(g.size(), -1);
  std::queue<VertexIndex> queue;
  dist[root] = 0;
  queue.push(root);
  while (!queue.empty()) {
    VertexIndex x = queue.front();
    queue.pop();
    for (VertexIndex y : g.neighbors(x))
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push(y);
      }
  }
  return dist;
}

}  // namespace kwg

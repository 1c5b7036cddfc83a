#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "kwgraph/graph.hpp"

namespace kwg {

namespace detail {

inline std::string join_coords(const std::vector<long long>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(c[i]);
  }
  return s;
}

inline void require_depth(int depth) {
  if (depth < 1) throw SpecError("truncation_depth must be a positive integer");
}

}  // namespace detail

// Z^d with unit measure and unit weights, truncated to the L1 ball of radius
// depth. Vertex ids are comma-joined coordinates ("0", "-3", "1,-2").
inline MeasuredGraph make_lattice(int dim, int depth) {
  detail::require_depth(depth);
  if (dim < 1) throw SpecError("lattice dimension must be positive");
  GraphBuilder b;
  std::vector<std::vector<long long>> points;
  std::vector<long long> c(static_cast<std::size_t>(dim), 0);
  std::function<void(int, long long)> rec = [&](int axis, long long budget) {
    if (axis == dim) {
      points.push_back(c);
      return;
    }
    for (long long v = -budget; v <= budget; ++v) {
      c[static_cast<std::size_t>(axis)] = v;
      rec(axis + 1, budget - std::llabs(v));
    }
    c[static_cast<std::size_t>(axis)] = 0;
  };
  rec(0, depth);

  auto norm1 = [](const std::vector<long long>& p) {
    long long s = 0;
    for (auto v : p) s += std::llabs(v);
    return s;
  };
  for (const auto& p : points) {
    b.add_vertex(detail::join_coords(p), 1.0, p);
    if (norm1(p) == depth) b.mark_incomplete(detail::join_coords(p));
  }
  for (const auto& p : points) {
    for (int axis = 0; axis < dim; ++axis) {
      auto q = p;
      q[static_cast<std::size_t>(axis)] += 1;
      if (norm1(q) <= depth) b.add_edge(detail::join_coords(p), detail::join_coords(q), 1.0);
    }
  }
  FamilyTag tag;
  tag.family = Family::lattice;
  tag.dimension = dim;
  tag.truncation_depth = depth;
  b.set_family(tag, detail::join_coords(std::vector<long long>(static_cast<std::size_t>(dim), 0)));
  return std::move(b).build();
}

// d-regular tree, unit measure and weights, truncated at the given depth.
// The root is "r"; the i-th child of vertex "v" is "v.i".
inline MeasuredGraph make_tree(int degree, int depth) {
  detail::require_depth(depth);
  if (degree < 2) throw SpecError("tree degree must be at least 2");
  GraphBuilder b;
  struct Node {
    std::string id;
    std::vector<long long> path;
  };
  std::vector<Node> frontier{{"r", {}}};
  b.add_vertex("r", 1.0, {});
  for (int level = 1; level <= depth; ++level) {
    std::vector<Node> next;
    for (const auto& parent : frontier) {
      int children = parent.path.empty() ? degree : degree - 1;
      for (int i = 0; i < children; ++i) {
        Node child{parent.id + "." + std::to_string(i), parent.path};
        child.path.push_back(i);
        b.add_vertex(child.id, 1.0, child.path);
        b.add_edge(parent.id, child.id, 1.0);
        if (level == depth) b.mark_incomplete(child.id);
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }
  FamilyTag tag;
  tag.family = Family::tree;
  tag.degree = degree;
  tag.truncation_depth = depth;
  b.set_family(tag, "r");
  return std::move(b).build();
}

// Half-line 0 - 1 - 2 - ..., unit measure and weights.
inline MeasuredGraph make_path(int depth) {
  detail::require_depth(depth);
  GraphBuilder b;
  for (long long i = 0; i <= depth; ++i) b.add_vertex(std::to_string(i), 1.0, {i});
  for (long long i = 0; i < depth; ++i) b.add_edge(std::to_string(i), std::to_string(i + 1), 1.0);
  b.mark_incomplete(std::to_string(depth));
  FamilyTag tag;
  tag.family = Family::path;
  tag.truncation_depth = depth;
  b.set_family(tag, "0");
  return std::move(b).build();
}

// Two-sided chain on Z with mu(x) = ratio^|x| and unit weights; finite total
// volume (1 + ratio) / (1 - ratio).
inline MeasuredGraph make_collapsing_chain(double ratio, int depth) {
  detail::require_depth(depth);
  if (!(ratio > 0.0 && ratio < 1.0)) throw SpecError("collapsing_chain ratio must lie in (0, 1)");
  GraphBuilder b;
  for (long long i = -depth; i <= depth; ++i)
    b.add_vertex(std::to_string(i), std::pow(ratio, static_cast<double>(std::llabs(i))), {i});
  for (long long i = -depth; i < depth; ++i)
    b.add_edge(std::to_string(i), std::to_string(i + 1), 1.0);
  b.mark_incomplete(std::to_string(depth));
  b.mark_incomplete(std::to_string(-depth));
  FamilyTag tag;
  tag.family = Family::collapsing_chain;
  tag.ratio = ratio;
  tag.truncation_depth = depth;
  b.set_family(tag, "0");
  return std::move(b).build();
}

}  // namespace kwg

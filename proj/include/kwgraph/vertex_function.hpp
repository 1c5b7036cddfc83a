#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kwgraph/errors.hpp"
#include "kwgraph/exhaustion.hpp"
#include "kwgraph/graph.hpp"

namespace kwg {

// Real function on a vertex set of a graph, extended by zero everywhere
// else. Values are stored densely over the graph; evaluation off the domain
// returns exactly 0 and writes there are rejected.
class VertexFunction {
 public:
  VertexFunction() = default;

  // Domain = every vertex of a graph with n vertices.
  explicit VertexFunction(std::size_t n) : values_(n, 0.0), domain_(n, 1) {}

  VertexFunction(std::size_t n, std::span<const VertexIndex> domain) : values_(n, 0.0), domain_(n, 0) {
    for (VertexIndex x : domain) {
      if (x >= n) throw DomainError("domain vertex out of range");
      domain_[x] = 1;
    }
  }

  static VertexFunction on_level(const MeasuredGraph& g, const Level& lv) {
    return VertexFunction(g.size(), lv.vertices);
  }

  static VertexFunction constant(const MeasuredGraph& g, double c) {
    VertexFunction f(g.size());
    std::fill(f.values_.begin(), f.values_.end(), c);
    return f;
  }

  double operator()(VertexIndex x) const { return x < values_.size() ? values_[x] : 0.0; }

  void set(VertexIndex x, double v) {
    if (!in_domain(x)) throw DomainError("write outside the domain of a vertex function");
    values_[x] = v;
  }

  bool in_domain(VertexIndex x) const { return x < domain_.size() && domain_[x] != 0; }
  std::size_t graph_size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  bool operator==(const VertexFunction&) const = default;

 private:
  std::vector<double> values_;
  std::vector<unsigned char> domain_;
};

// Local vector (ordered as lv.vertices) -> function on V_k.
template <typename Vec>
VertexFunction from_local(const MeasuredGraph& g, const Level& lv, const Vec& local) {
  VertexFunction f = VertexFunction::on_level(g, lv);
  for (std::size_t i = 0; i < lv.size(); ++i) f.set(lv.vertices[i], local[static_cast<decltype(local.size())>(i)]);
  return f;
}

inline std::vector<double> to_local(const Level& lv, const VertexFunction& f) {
  std::vector<double> out(lv.size());
  for (std::size_t i = 0; i < lv.size(); ++i) out[i] = f(lv.vertices[i]);
  return out;
}

}  // namespace kwg

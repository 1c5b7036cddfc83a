#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "kwgraph/errors.hpp"
#include "kwgraph/exhaustion.hpp"
#include "kwgraph/graph.hpp"
#include "kwgraph/vertex_function.hpp"

namespace kwg {

// Graph plus an optional exhaustion level. With a level the operators are
// the restricted ones (neighbour sums over V_k only), so that for f
// supported on V_k and x in V_k
//     laplacian(full)(x) = laplacian(level)(x) - phi_k(x) f(x).
struct OperatorContext {
  const MeasuredGraph& graph;
  const Level* level = nullptr;

  OperatorContext(const MeasuredGraph& g, const Level* lv = nullptr) : graph(g), level(lv) {}
  OperatorContext(const MeasuredGraph& g, const Level& lv) : graph(g), level(&lv) {}

  OperatorContext full() const { return OperatorContext(graph); }

  const Level& require_level() const {
    if (!level) throw DomainError("operation needs an exhaustion level");
    return *level;
  }
};

namespace detail {

inline void check_vertex(const OperatorContext& ctx, VertexIndex x) {
  if (x >= ctx.graph.size()) throw DomainError("vertex index out of range");
  if (ctx.level) {
    if (!ctx.level->contains(x))
      throw DomainError("vertex '" + ctx.graph.id(x) + "' is outside level " +
                        std::to_string(ctx.level->k));
  } else if (!ctx.graph.complete(x)) {
    throw DomainError("vertex '" + ctx.graph.id(x) + "' lies on the truncation shell");
  }
}

inline bool counts(const OperatorContext& ctx, VertexIndex y) {
  return !ctx.level || ctx.level->contains(y);
}

// 2 mu(x) |grad f|^2(x) over the neighbours present in the graph, with no
// completeness check. Used for closure vertices, where f vanishes on x and
// on every neighbour that was not generated.
inline double twice_weighted_grad_sq(const MeasuredGraph& g, const VertexFunction& f, VertexIndex x) {
  auto ns = g.neighbors(x);
  auto ws = g.weights(x);
  double s = 0.0;
  const double fx = f(x);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double d = fx - f(ns[i]);
    s += ws[i] * d * d;
  }
  return s;
}

inline void require_supported_on_level(const OperatorContext& ctx, const VertexFunction& f) {
  const Level& lv = ctx.require_level();
  auto vals = f.values();
  for (VertexIndex x = 0; x < vals.size(); ++x)
    if (vals[x] != 0.0 && !lv.contains(x))
      throw DomainError("function is not supported on level " + std::to_string(lv.k) +
                        " (nonzero at '" + ctx.graph.id(x) + "')");
}

}  // namespace detail

// (1/mu(x)) sum_{y~x} w_xy (f(y) - f(x)); restricted to y in V_k when the
// context carries a level.
inline double laplacian(const OperatorContext& ctx, const VertexFunction& f, VertexIndex x) {
  detail::check_vertex(ctx, x);
  auto ns = ctx.graph.neighbors(x);
  auto ws = ctx.graph.weights(x);
  const double fx = f(x);
  double s = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (detail::counts(ctx, ns[i])) s += ws[i] * (f(ns[i]) - fx);
  return s / ctx.graph.mu(x);
}

// Boundary potential: (1/mu(x)) sum_{y~x, y not in V_k} w_xy.
inline double phi_k(const OperatorContext& ctx, VertexIndex x) {
  const Level& lv = ctx.require_level();
  detail::check_vertex(ctx, x);
  auto ns = ctx.graph.neighbors(x);
  auto ws = ctx.graph.weights(x);
  double s = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (!lv.contains(ns[i])) s += ws[i];
  return s / ctx.graph.mu(x);
}

// phi_k for every vertex of the level, in level order.
inline std::vector<double> boundary_potential(const OperatorContext& ctx) {
  const Level& lv = ctx.require_level();
  std::vector<double> phi(lv.size());
  for (std::size_t i = 0; i < lv.size(); ++i) phi[i] = phi_k(ctx, lv.vertices[i]);
  return phi;
}

inline double grad_norm_squared(const OperatorContext& ctx, const VertexFunction& f, VertexIndex x) {
  detail::check_vertex(ctx, x);
  auto ns = ctx.graph.neighbors(x);
  auto ws = ctx.graph.weights(x);
  const double fx = f(x);
  double s = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (detail::counts(ctx, ns[i])) {
      const double d = fx - f(ns[i]);
      s += ws[i] * d * d;
    }
  return s / (2.0 * ctx.graph.mu(x));
}

inline double grad_norm(const OperatorContext& ctx, const VertexFunction& f, VertexIndex x) {
  return std::sqrt(grad_norm_squared(ctx, f, x));
}

// sum_{x in S} f(x) mu(x).
inline double integral(const MeasuredGraph& g, const VertexFunction& f, std::span<const VertexIndex> S) {
  double s = 0.0;
  for (VertexIndex x : S) {
    if (x >= g.size()) throw DomainError("integration set contains an unknown vertex");
    s += f(x) * g.mu(x);
  }
  return s;
}

inline double integral(const MeasuredGraph& g, const VertexFunction& f, const std::vector<std::string>& S) {
  std::vector<VertexIndex> idx;
  idx.reserve(S.size());
  for (const auto& id : S) idx.push_back(g.index_of(id));
  return integral(g, f, std::span<const VertexIndex>(idx));
}

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

// Green formula on the closure for f supported on V_k:
//   lhs = int_{closure} |grad f|^2,  rhs = -int_{closure} f (Delta f).
inline IdentitySides green_check(const OperatorContext& ctx, const VertexFunction& f) {
  detail::require_supported_on_level(ctx, f);
  const Level& lv = *ctx.level;
  IdentitySides out;
  for (VertexIndex x : lv.closure) out.lhs += 0.5 * detail::twice_weighted_grad_sq(ctx.graph, f, x);
  const OperatorContext full = ctx.full();
  for (VertexIndex x : lv.closure) {
    const double fx = f(x);
    if (fx == 0.0) continue;
    out.rhs -= fx * laplacian(full, f, x) * ctx.graph.mu(x);
  }
  return out;
}

// Boundary identity for the zero extension of f supported on V_k:
//   lhs = int_{closure} |grad f|^2,
//   rhs = int_{V_k} (|grad_k f|^2 + phi_k f^2),
// with grad_k the level-restricted gradient. Each boundary edge contributes
// w_xy f(x)^2 once to both sides.
inline IdentitySides dirichlet_identity(const OperatorContext& ctx, const VertexFunction& f) {
  detail::require_supported_on_level(ctx, f);
  const Level& lv = *ctx.level;
  IdentitySides out;
  for (VertexIndex x : lv.closure) out.lhs += 0.5 * detail::twice_weighted_grad_sq(ctx.graph, f, x);
  for (VertexIndex x : lv.vertices) {
    const double fx = f(x);
    out.rhs += (grad_norm_squared(ctx, f, x) + phi_k(ctx, x) * fx * fx) * ctx.graph.mu(x);
  }
  return out;
}

}  // namespace kwg

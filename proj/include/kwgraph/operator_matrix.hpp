#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kwgraph/calculus.hpp"

namespace kwg {

// Matrix form of the level operator, ordered as lv.vertices:
//   stiffness A = L_k + diag(boundary weight),  mass M = diag(mu),
// so that  -(Delta_k - phi_k) f = M^{-1} A f  and  f^T A f = int_{closure} |grad f|^2.
// Only the oracle and the spectral module materialise; the flow stays lazy.
struct LevelMatrices {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
};

inline LevelMatrices materialize(const OperatorContext& ctx) {
  const Level& lv = ctx.require_level();
  const auto n = static_cast<Eigen::Index>(lv.size());
  std::vector<Eigen::Triplet<double>> triplets;
  LevelMatrices m;
  m.mass.resize(n);
  for (std::size_t i = 0; i < lv.size(); ++i) {
    const VertexIndex x = lv.vertices[i];
    const auto row = static_cast<Eigen::Index>(i);
    m.mass(row) = ctx.graph.mu(x);
    auto ns = ctx.graph.neighbors(x);
    auto ws = ctx.graph.weights(x);
    double diag = 0.0;
    for (std::size_t j = 0; j < ns.size(); ++j) {
      diag += ws[j];
      if (lv.contains(ns[j]))
        triplets.emplace_back(row, static_cast<Eigen::Index>(lv.position(ns[j])), -ws[j]);
    }
    triplets.emplace_back(row, row, diag);
  }
  m.stiffness.resize(n, n);
  m.stiffness.setFromTriplets(triplets.begin(), triplets.end());
  m.stiffness.makeCompressed();
  return m;
}

inline Eigen::VectorXd to_eigen(const Level& lv, const VertexFunction& f) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(lv.size()));
  for (std::size_t i = 0; i < lv.size(); ++i) v(static_cast<Eigen::Index>(i)) = f(lv.vertices[i]);
  return v;
}

}  // namespace kwg

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "kwgraph/calculus.hpp"
#include "kwgraph/operator_matrix.hpp"

namespace kwg {

struct SpectralOptions {
  double tol = 1e-14;            // relative change of the Rayleigh quotient
  int max_iterations = 100000;
  std::size_t dense_limit = 200;  // dense cross-check below this size
};

struct Lambda1 {
  double value = 0.0;
  bool boundary_empty = false;
  int iterations = 0;
  std::optional<double> dense_value;
  std::string note;
};

// Smallest eigenvalue of the generalised problem A v = lambda M v, i.e. the
// Dirichlet Laplacian of the level, by dense LAPACK-style decomposition.
inline double dense_dirichlet_lambda1(const OperatorContext& ctx) {
  const LevelMatrices m = materialize(ctx);
  const Eigen::MatrixXd A = Eigen::MatrixXd(m.stiffness);
  const Eigen::MatrixXd M = m.mass.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// min over nonzero f vanishing on the boundary of
//   int_{closure} |grad f|^2 / int_{closure} f^2,
// by inverse iteration on the assembled operator. An empty boundary admits
// constants, so the infimum is reported as 0 with a note.
inline Lambda1 dirichlet_lambda1(const OperatorContext& ctx, const SpectralOptions& opts = {}) {
  const Level& lv = ctx.require_level();
  Lambda1 out;
  if (lv.boundary.empty()) {
    out.boundary_empty = true;
    out.note = "empty boundary: constants are admissible, infimum is 0";
    return out;
  }
  const LevelMatrices m = materialize(ctx);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(m.stiffness);
  if (ldlt.info() != Eigen::Success) throw NumericalError("spectral: stiffness factorisation failed");

  const auto n = static_cast<Eigen::Index>(lv.size());
  // The ground state of a connected level is positive, so the constant
  // start vector overlaps it.
  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  u /= std::sqrt(u.dot(m.mass.cwiseProduct(u)));
  double lambda = u.dot(m.stiffness * u);
  for (out.iterations = 1; out.iterations <= opts.max_iterations; ++out.iterations) {
    Eigen::VectorXd x = ldlt.solve(m.mass.cwiseProduct(u));
    x /= std::sqrt(x.dot(m.mass.cwiseProduct(x)));
    const double next = x.dot(m.stiffness * x);
    u = std::move(x);
    const bool done = std::abs(next - lambda) <= opts.tol * next;
    lambda = next;
    if (done) break;
  }
  out.value = lambda;
  if (lv.size() <= opts.dense_limit) out.dense_value = dense_dirichlet_lambda1(ctx);
  return out;
}

enum class CheegerVerdict { empirically_cheeger, empirically_degenerating, inconclusive };

inline const char* verdict_name(CheegerVerdict v) {
  switch (v) {
    case CheegerVerdict::empirically_cheeger: return "empirically-cheeger";
    case CheegerVerdict::empirically_degenerating: return "empirically-degenerating";
    case CheegerVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct CheegerOptions {
  double margin = 1e-6;
  // Degenerating when the quadratic-decay extrapolation of lambda_1 falls
  // below this fraction of the scanned floor.
  double decay_ratio = 0.5;
  SpectralOptions spectral;
};

struct CheegerLevel {
  int k = 0;
  double lambda_1 = 0.0;
  double sqrt_lambda_1 = 0.0;
  std::optional<double> dense_lambda_1;
  bool boundary_empty = false;

  bool operator==(const CheegerLevel&) const = default;
};

struct CheegerReport {
  std::vector<CheegerLevel> per_level;
  double inf_over_levels = 0.0;
  std::optional<double> extrapolated_limit;
  bool monotone = true;  // lambda_1(k+1) <= lambda_1(k) along the scan
  double margin = 0.0;
  CheegerVerdict verdict = CheegerVerdict::inconclusive;
  std::string note;

  bool operator==(const CheegerReport&) const = default;
};

namespace detail {

// Levels are balls of radius k, so the effective Dirichlet radius is k + 1.
// lambda(k) ~ L + C/(k+1)^2 gives L by Richardson elimination of C.
inline double quadratic_extrapolation(int k1, double l1, int k2, double l2) {
  const double a = static_cast<double>(k1 + 1) * (k1 + 1);
  const double b = static_cast<double>(k2 + 1) * (k2 + 1);
  return (b * l2 - a * l1) / (b - a);
}

inline CheegerReport classify(std::vector<CheegerLevel> levels, const CheegerOptions& opts) {
  CheegerReport rep;
  rep.margin = opts.margin;
  rep.per_level = std::move(levels);
  if (rep.per_level.empty()) {
    rep.note = "no levels scanned";
    return rep;
  }
  rep.inf_over_levels = std::numeric_limits<double>::infinity();
  for (const auto& l : rep.per_level) rep.inf_over_levels = std::min(rep.inf_over_levels, l.lambda_1);
  for (std::size_t i = 1; i < rep.per_level.size(); ++i)
    if (rep.per_level[i].lambda_1 > rep.per_level[i - 1].lambda_1 * (1.0 + 1e-12)) rep.monotone = false;

  const bool any_empty = std::any_of(rep.per_level.begin(), rep.per_level.end(),
                                     [](const CheegerLevel& l) { return l.boundary_empty; });
  if (any_empty) {
    rep.note = "some level has an empty boundary (finite graph exhausted); the inequality is vacuous there";
    return rep;
  }
  if (rep.per_level.size() < 3) {
    rep.note = "fewer than three levels scanned";
    return rep;
  }
  const auto& a = rep.per_level[rep.per_level.size() - 2];
  const auto& b = rep.per_level.back();
  rep.extrapolated_limit = quadratic_extrapolation(a.k, a.lambda_1, b.k, b.lambda_1);

  if (!rep.monotone) {
    rep.note = "lambda_1 not monotone along the scan";
  } else if (rep.inf_over_levels < opts.margin ||
             *rep.extrapolated_limit < opts.decay_ratio * rep.inf_over_levels) {
    rep.verdict = CheegerVerdict::empirically_degenerating;
    rep.note = "lambda_1 decays towards 0 over the scanned range";
  } else {
    rep.verdict = CheegerVerdict::empirically_cheeger;
    rep.note = "lambda_1 bounded below over the scanned range (empirical, not a proof)";
  }
  return rep;
}

}  // namespace detail

inline CheegerLevel cheeger_level(const MeasuredGraph& g, const Level& lv, const SpectralOptions& opts) {
  const Lambda1 l = dirichlet_lambda1(OperatorContext(g, lv), opts);
  return CheegerLevel{lv.k, l.value, std::sqrt(l.value), l.dense_value, l.boundary_empty};
}

// Dirichlet spectral gap per level 1..K and an empirical verdict.
inline CheegerReport cheeger_scan(const MeasuredGraph& g, const Exhaustion& ex, int K,
                                  const CheegerOptions& opts = {}) {
  std::vector<CheegerLevel> levels;
  for (int k = 1; k <= K; ++k) levels.push_back(cheeger_level(g, ex.level(k), opts.spectral));
  return detail::classify(std::move(levels), opts);
}

}  // namespace kwg

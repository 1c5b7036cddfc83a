#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "kwgraph/calculus.hpp"
#include "kwgraph/errors.hpp"
#include "kwgraph/flow.hpp"
#include "kwgraph/operator_matrix.hpp"

namespace kwg {

// Residual and Jacobian of  Delta_k f - phi_k f + h e^f - g  at f, in level
// order. The Jacobian  J = -M^{-1} A + diag(h e^f)  is symmetric in the
// mu-weighted inner product and, for h <= 0 and a nonempty boundary,
// negative definite there. `system` holds M(-J) = A - diag(mu h e^f),
// the symmetric positive definite matrix the linear solves use.
struct Assembly {
  Eigen::VectorXd residual;
  Eigen::SparseMatrix<double> jacobian;
  Eigen::SparseMatrix<double> system;
  Eigen::VectorXd mass;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 100;
  double min_damping = 1e-10;
  std::size_t direct_limit = 5000;  // LDLT up to this many unknowns, CG above
};

struct NewtonReport {
  VertexFunction f_star;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> damping_history;
};

namespace detail {

inline Assembly assemble_from(const LevelMatrices& m, const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                              const Eigen::VectorXd& h) {
  Assembly a;
  a.mass = m.mass;
  const Eigen::VectorXd reaction = (h.array() * f.array().exp()).matrix();
  a.residual = -(m.stiffness * f).cwiseQuotient(m.mass) + reaction - g;

  Eigen::SparseMatrix<double> react(f.size(), f.size());
  react.reserve(Eigen::VectorXi::Constant(f.size(), 1));
  for (Eigen::Index i = 0; i < f.size(); ++i) react.insert(i, i) = reaction(i);
  const Eigen::VectorXd inv_mass = m.mass.cwiseInverse();
  a.jacobian = -(inv_mass.asDiagonal() * m.stiffness) + react;
  a.jacobian.makeCompressed();
  a.system = m.stiffness - m.mass.asDiagonal() * react;
  a.system.makeCompressed();
  return a;
}

inline void refuse_positive_h(const OperatorContext& ctx, const VertexFunction& h) {
  for (VertexIndex x : ctx.require_level().vertices)
    if (h(x) > 0.0)
      throw HypothesisViolation("h > 0 at '" + ctx.graph.id(x) +
                                "': Jacobian no longer definite, use the flow solver alone");
}

inline double weighted_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& mass) {
  return std::sqrt((r.array().square() * mass.array()).sum());
}

}  // namespace detail

inline Assembly assemble(const OperatorContext& ctx, const VertexFunction& f, const VertexFunction& g,
                         const VertexFunction& h) {
  const Level& lv = ctx.require_level();
  detail::refuse_positive_h(ctx, h);
  return detail::assemble_from(materialize(ctx), to_eigen(lv, f), to_eigen(lv, g), to_eigen(lv, h));
}

// Damped Newton from f = 0: step halving until the mu-weighted residual norm
// decreases; stops when max |residual| <= tol.
inline NewtonReport newton_solve(const OperatorContext& ctx, const VertexFunction& g, const VertexFunction& h,
                                 const NewtonOptions& opts = {}) {
  const Level& lv = ctx.require_level();
  detail::check_level_data(ctx, g, h);
  detail::refuse_positive_h(ctx, h);
  const LevelMatrices m = materialize(ctx);
  const Eigen::VectorXd gv = to_eigen(lv, g), hv = to_eigen(lv, h);

  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lv.size()));
  Assembly a = detail::assemble_from(m, f, gv, hv);
  NewtonReport rep;

  auto solve = [&](const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    if (lv.size() <= opts.direct_limit) {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
      if (ldlt.info() != Eigen::Success) throw NumericalError("Newton: factorisation failed");
      Eigen::VectorXd x = ldlt.solve(rhs);
      if (ldlt.info() != Eigen::Success) throw NumericalError("Newton: linear solve failed");
      return x;
    }
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(K);
    cg.setTolerance(1e-14);
    cg.setMaxIterations(static_cast<Eigen::Index>(10 * lv.size()));
    Eigen::VectorXd x = cg.solve(rhs);
    if (cg.info() != Eigen::Success) throw NumericalError("Newton: conjugate gradient breakdown");
    return x;
  };

  while (a.residual.lpNorm<Eigen::Infinity>() > opts.tol) {
    if (rep.iterations >= opts.max_iterations) break;
    // Newton step: J d = -r  <=>  M(-J) d = M r.
    const Eigen::VectorXd step = solve(a.system, m.mass.cwiseProduct(a.residual));
    const double merit = detail::weighted_norm(a.residual, m.mass);
    double s = 1.0;
    for (;;) {
      Eigen::VectorXd trial = f + s * step;
      if (trial.allFinite() && trial.maxCoeff() < detail::kOverflowGuard) {
        Assembly next = detail::assemble_from(m, trial, gv, hv);
        if (detail::weighted_norm(next.residual, m.mass) < merit) {
          f = std::move(trial);
          a = std::move(next);
          break;
        }
      }
      s *= 0.5;
      if (s < opts.min_damping) throw NumericalError("Newton: damping underflow");
    }
    rep.damping_history.push_back(s);
    ++rep.iterations;
  }

  rep.final_residual = a.residual.lpNorm<Eigen::Infinity>();
  rep.converged = rep.final_residual <= opts.tol;
  rep.f_star = from_local(ctx.graph, lv, f);
  return rep;
}

}  // namespace kwg

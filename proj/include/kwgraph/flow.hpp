#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "kwgraph/calculus.hpp"
#include "kwgraph/errors.hpp"
#include "kwgraph/vertex_function.hpp"

namespace kwg {

struct FlowConfig {
  // Unset: 0.1 mu_min / (max weighted degree + max|h| + 1) over the level.
  std::optional<double> dt_init;
  double dt_min = 1e-14;
  double dt_max = 10.0;
  double tol_residual = 1e-9;
  double t_max = 1e7;
  double descent_backtrack = 0.5;
  std::size_t max_steps = 50'000'000;

  void validate() const {
    if (!(dt_min > 0.0) || !(dt_max >= dt_min)) throw SpecError("flow: need 0 < dt_min <= dt_max");
    if (dt_init && !(*dt_init >= dt_min && *dt_init <= dt_max))
      throw SpecError("flow: dt_init must lie in [dt_min, dt_max]");
    if (!(tol_residual > 0.0)) throw SpecError("flow: tol_residual must be positive");
    if (!(t_max > 0.0)) throw SpecError("flow: t_max must be positive");
    if (!(descent_backtrack > 0.0 && descent_backtrack < 1.0))
      throw SpecError("flow: descent_backtrack must lie in (0, 1)");
  }
};

// One snapshot of the relaxation on a fixed level.
struct FlowState {
  double t = 0.0;
  VertexFunction f;
  VertexFunction f_t;
  double energy = 0.0;
  double residual = 0.0;  // max |f_t|
  std::size_t step_count = 0;
  double dt = 0.0;  // next trial step
};

struct StepOutcome {
  FlowState state;
  double dt_used = 0.0;
  double energy_change = 0.0;  // J(new) - J(old), evaluated without cancellation
  int backtracks = 0;
};

enum class Regime { h_zero, h_nonzero };

struct FlowResult {
  VertexFunction f;
  bool converged = false;
  double residual = 0.0;
  double energy = 0.0;
  double estimate = 0.0;          // stationarity estimate, must be <= 0
  double velocity_ceiling = 0.0;  // max |f_t(0, .)|
  double max_velocity_seen = 0.0;
  double max_energy_change = -std::numeric_limits<double>::infinity();
  double max_energy_rise = 0.0;   // largest J(n+1) - J(n) over recomputed energies
  std::size_t steps = 0;
  double t = 0.0;
  Regime regime = Regime::h_nonzero;
};

using FlowObserver = std::function<void(const StepOutcome&)>;

namespace detail {

constexpr double kOverflowGuard = 700.0;

inline void check_level_data(const OperatorContext& ctx, const VertexFunction& g, const VertexFunction& h) {
  const Level& lv = ctx.require_level();
  for (VertexIndex x : lv.vertices)
    if (!g.in_domain(x) || !h.in_domain(x))
      throw DomainError("g and h must be defined on every vertex of level " + std::to_string(lv.k));
}

}  // namespace detail

// J_k(f) = int_{V_k} ( f g + 1/2 |grad_k f|^2 - (e^f - 1) h + 1/2 phi_k f^2 ).
inline double energy(const OperatorContext& ctx, const VertexFunction& f, const VertexFunction& g,
                     const VertexFunction& h) {
  detail::check_level_data(ctx, g, h);
  detail::require_supported_on_level(ctx, f);
  double s = 0.0;
  for (VertexIndex x : ctx.level->vertices) {
    const double fx = f(x);
    const double density = fx * g(x) + 0.5 * grad_norm_squared(ctx, f, x) - std::expm1(fx) * h(x) +
                           0.5 * phi_k(ctx, x) * fx * fx;
    s += density * ctx.graph.mu(x);
  }
  return s;
}

// Left side of the a-priori estimate satisfied by the level solution,
//   int_{V_k} ( f g + 1/2 (|grad_k f|^2 + phi_k f^2) - (e^f - 1) h ).
inline double stationarity_estimate(const OperatorContext& ctx, const VertexFunction& f,
                                    const VertexFunction& g, const VertexFunction& h) {
  detail::check_level_data(ctx, g, h);
  detail::require_supported_on_level(ctx, f);
  double s = 0.0;
  for (VertexIndex x : ctx.level->vertices) {
    const double fx = f(x);
    s += (fx * g(x) + 0.5 * (grad_norm_squared(ctx, f, x) + phi_k(ctx, x) * fx * fx) -
          std::expm1(fx) * h(x)) *
         ctx.graph.mu(x);
  }
  return s;
}

// Right-hand side of the heat equation: Delta_k f + h e^f - g - phi_k f.
inline VertexFunction velocity(const OperatorContext& ctx, const VertexFunction& f, const VertexFunction& g,
                               const VertexFunction& h) {
  detail::check_level_data(ctx, g, h);
  const Level& lv = *ctx.level;
  VertexFunction ft = VertexFunction::on_level(ctx.graph, lv);
  for (VertexIndex x : lv.vertices) {
    const double fx = f(x);
    ft.set(x, laplacian(ctx, f, x) + h(x) * std::exp(fx) - g(x) - phi_k(ctx, x) * fx);
  }
  return ft;
}

inline double sup_norm_on(const Level& lv, const VertexFunction& f) {
  double m = 0.0;
  for (VertexIndex x : lv.vertices) m = std::max(m, std::abs(f(x)));
  return m;
}

inline double default_dt(const OperatorContext& ctx, const VertexFunction& h) {
  const Level& lv = ctx.require_level();
  double mu_min = std::numeric_limits<double>::infinity(), deg_max = 0.0, h_max = 0.0;
  for (VertexIndex x : lv.vertices) {
    mu_min = std::min(mu_min, ctx.graph.mu(x));
    deg_max = std::max(deg_max, ctx.graph.weighted_degree(x));
    h_max = std::max(h_max, std::abs(h(x)));
  }
  return 0.1 * mu_min / (deg_max + h_max + 1.0);
}

// f = 0 on V_k, the initial condition of the flow.
inline FlowState initial_state(const OperatorContext& ctx, const VertexFunction& g, const VertexFunction& h,
                               const FlowConfig& cfg) {
  cfg.validate();
  FlowState s;
  s.f = VertexFunction::on_level(ctx.graph, ctx.require_level());
  s.f_t = velocity(ctx, s.f, g, h);
  s.energy = energy(ctx, s.f, g, h);
  s.residual = sup_norm_on(*ctx.level, s.f_t);
  s.dt = std::clamp(cfg.dt_init.value_or(default_dt(ctx, h)), cfg.dt_min, cfg.dt_max);
  return s;
}

// One explicit Euler step f <- f + dt f_t. The trial step is halved (by
// descent_backtrack) until J_k does not increase and the step is
// sup-norm stable for the linearised velocity update:
//     dt * (deg(x)/mu(x) + |h(x)| e^{max(f_old, f_new)(x)}) <= 1  for all x.
// The second condition makes f_t(new) = (I + dt J(xi)) f_t(old) with a
// nonnegative, row-substochastic matrix, so max |f_t| cannot grow.
inline StepOutcome flow_step(const FlowState& state, const FlowConfig& cfg, const OperatorContext& ctx,
                             const VertexFunction& g, const VertexFunction& h) {
  const Level& lv = ctx.require_level();
  StepOutcome out;
  if (state.residual == 0.0) {
    out.state = state;
    out.state.t += state.dt;
    out.state.step_count += 1;
    out.dt_used = state.dt;
    return out;
  }

  const std::size_t n = lv.size();
  std::vector<double> f(n), v(n), phi(n), rate(n), gv(n), hv(n), mu(n);
  for (std::size_t i = 0; i < n; ++i) {
    const VertexIndex x = lv.vertices[i];
    f[i] = state.f(x);
    v[i] = state.f_t(x);
    phi[i] = phi_k(ctx, x);
    mu[i] = ctx.graph.mu(x);
    rate[i] = ctx.graph.weighted_degree(x) / mu[i];
    gv[i] = g(x);
    hv[i] = h(x);
  }

  double stable = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    stable = std::min(stable, 1.0 / (rate[i] + std::abs(hv[i]) * std::exp(std::min(f[i], detail::kOverflowGuard))));
  double dt = std::min({state.dt, cfg.dt_max, stable});

  std::vector<double> delta(n);
  for (;;) {
    if (dt < cfg.dt_min)
      throw NumericalError("flow step underflow on level " + std::to_string(lv.k) +
                           ": no descent step above dt_min");
    bool finite = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      delta[i] = dt * v[i];
      const double fn = f[i] + delta[i];
      if (!std::isfinite(fn)) finite = false;
      if (fn > detail::kOverflowGuard)
        throw NumericalError("overflow guard: f exceeded 700 on level " + std::to_string(lv.k) +
                             " (h <= 0 keeps the flow bounded; check the data)");
      worst = std::max(worst, dt * (rate[i] + std::abs(hv[i]) * std::exp(std::max(f[i], fn))));
    }
    if (!finite) throw NumericalError("non-finite value in flow step");

    // J(f + delta) - J(f) summand by summand.
    double dj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = delta[i];
      dj += mu[i] * (d * gv[i] - hv[i] * std::exp(f[i]) * std::expm1(d) + 0.5 * phi[i] * d * (2.0 * f[i] + d));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const VertexIndex x = lv.vertices[i];
      auto ns = ctx.graph.neighbors(x);
      auto ws = ctx.graph.weights(x);
      for (std::size_t j = 0; j < ns.size(); ++j) {
        if (ns[j] <= x || !lv.contains(ns[j])) continue;
        const std::size_t p = lv.position(ns[j]);
        const double diff = f[i] - f[p];
        const double e = delta[i] - delta[p];
        dj += 0.5 * ws[j] * e * (2.0 * diff + e);
      }
    }

    if (dj <= 0.0 && worst <= 1.0) {
      out.energy_change = dj;
      break;
    }
    dt *= cfg.descent_backtrack;
    ++out.backtracks;
  }

  FlowState next;
  next.f = VertexFunction::on_level(ctx.graph, lv);
  for (std::size_t i = 0; i < n; ++i) next.f.set(lv.vertices[i], f[i] + delta[i]);
  next.f_t = velocity(ctx, next.f, g, h);
  next.energy = energy(ctx, next.f, g, h);
  next.residual = sup_norm_on(lv, next.f_t);
  next.t = state.t + dt;
  next.step_count = state.step_count + 1;
  next.dt = std::min(cfg.dt_max, dt / cfg.descent_backtrack);
  out.state = std::move(next);
  out.dt_used = dt;
  return out;
}

inline void require_nonpositive_h(const OperatorContext& ctx, const VertexFunction& h) {
  for (VertexIndex x : ctx.require_level().vertices)
    if (h(x) > 0.0)
      throw HypothesisViolation("h > 0 at vertex '" + ctx.graph.id(x) + "' (the flow needs h <= 0)");
}

// Runs the flow from f = 0 until max|f_t| <= tol_residual, t > t_max or
// max_steps. Non-convergence is reported in the result, not thrown.
inline FlowResult relax(const OperatorContext& ctx, const VertexFunction& g, const VertexFunction& h,
                        const FlowConfig& cfg, const FlowObserver& observer = {}) {
  const Level& lv = ctx.require_level();
  detail::check_level_data(ctx, g, h);
  require_nonpositive_h(ctx, h);

  FlowResult r;
  r.regime = Regime::h_zero;
  for (VertexIndex x : lv.vertices)
    if (h(x) != 0.0) r.regime = Regime::h_nonzero;

  FlowState state = initial_state(ctx, g, h, cfg);
  r.velocity_ceiling = state.residual;
  r.max_velocity_seen = state.residual;
  if (observer) observer(StepOutcome{state, 0.0, 0.0, 0});

  while (state.residual > cfg.tol_residual && state.t <= cfg.t_max && state.step_count < cfg.max_steps) {
    StepOutcome step = flow_step(state, cfg, ctx, g, h);
    r.max_energy_change = std::max(r.max_energy_change, step.energy_change);
    r.max_energy_rise = std::max(r.max_energy_rise, step.state.energy - state.energy);
    r.max_velocity_seen = std::max(r.max_velocity_seen, step.state.residual);
    if (observer) observer(step);
    state = std::move(step.state);
  }

  r.converged = state.residual <= cfg.tol_residual;
  r.residual = state.residual;
  r.energy = state.energy;
  r.estimate = stationarity_estimate(ctx, state.f, g, h);
  r.steps = state.step_count;
  r.t = state.t;
  r.f = std::move(state.f);
  return r;
}

}  // namespace kwg

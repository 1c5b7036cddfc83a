#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "kwgraph/calculus.hpp"
#include "kwgraph/conditions.hpp"
#include "kwgraph/exhaustion.hpp"
#include "kwgraph/flow.hpp"
#include "kwgraph/functions.hpp"
#include "kwgraph/graph_spec.hpp"
#include "kwgraph/json_io.hpp"
#include "kwgraph/newton.hpp"
#include "kwgraph/spectral.hpp"

namespace kwg {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { exit_ok = 0, exit_hypothesis = 2, exit_nonconvergence = 3, exit_spec = 4 };

struct OracleConfig {
  bool enabled = true;
  double tol = 1e-10;
};

struct OutputConfig {
  std::string dir = "out";
  bool traces = false;
  std::size_t trace_stride = 1;
};

// Run-config document:
//   {graph, g, h, exhaustion:{root, depth}, flow:{...}, oracle:{enabled, tol},
//    probes:[...], output:{dir, traces, trace_stride}, cheeger:{margin}, threads}
struct RunConfig {
  nlohmann::json graph;
  FunctionSpec g;
  FunctionSpec h;
  std::optional<std::string> root;
  int depth = 4;
  FlowConfig flow;
  OracleConfig oracle;
  std::optional<std::vector<std::string>> probes;
  OutputConfig output;
  CheegerOptions cheeger;
  unsigned threads = 0;  // 0: one per hardware thread
};

inline RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw SpecError("run config must be a JSON object");
  for (const char* key : {"graph", "g", "h"})
    if (!j.contains(key)) throw SpecError(std::string("run config needs '") + key + "'");
  RunConfig c;
  try {
    c.graph = j.at("graph");
    c.g = parse_function_spec(j.at("g"));
    c.h = parse_function_spec(j.at("h"));
    if (j.contains("exhaustion")) {
      const auto& e = j.at("exhaustion");
      if (e.contains("root") && !e.at("root").is_null()) c.root = detail::vertex_id_from_json(e.at("root"));
      c.depth = e.value("depth", c.depth);
    }
    if (j.contains("flow")) {
      const auto& f = j.at("flow");
      if (f.contains("dt_init") && !f.at("dt_init").is_null()) c.flow.dt_init = f.at("dt_init").get<double>();
      if (f.contains("dt")) c.flow.dt_init = f.at("dt").get<double>();
      c.flow.dt_min = f.value("dt_min", c.flow.dt_min);
      c.flow.dt_max = f.value("dt_max", c.flow.dt_max);
      c.flow.tol_residual = f.value("tol", c.flow.tol_residual);
      c.flow.t_max = f.value("t_max", c.flow.t_max);
      c.flow.descent_backtrack = f.value("descent_backtrack", c.flow.descent_backtrack);
      c.flow.max_steps = f.value("max_steps", c.flow.max_steps);
    }
    if (j.contains("oracle")) {
      c.oracle.enabled = j.at("oracle").value("enabled", c.oracle.enabled);
      c.oracle.tol = j.at("oracle").value("tol", c.oracle.tol);
    }
    if (j.contains("probes") && !j.at("probes").is_null()) {
      std::vector<std::string> p;
      for (const auto& v : j.at("probes")) p.push_back(detail::vertex_id_from_json(v));
      c.probes = std::move(p);
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      c.output.dir = o.value("dir", c.output.dir);
      c.output.traces = o.value("traces", c.output.traces);
      c.output.trace_stride = o.value("trace_stride", c.output.trace_stride);
    }
    if (j.contains("cheeger")) c.cheeger.margin = j.at("cheeger").value("margin", c.cheeger.margin);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("run config: ") + e.what());
  }
  if (c.depth < 1) throw SpecError("exhaustion depth must be positive");
  if (c.output.trace_stride == 0) throw SpecError("trace_stride must be positive");
  c.flow.validate();
  return c;
}

inline nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["graph"] = c.graph;
  j["g"] = function_spec_to_json(c.g);
  j["h"] = function_spec_to_json(c.h);
  j["exhaustion"] = {{"root", c.root ? nlohmann::json(*c.root) : nlohmann::json(nullptr)}, {"depth", c.depth}};
  j["flow"] = {{"dt_init", c.flow.dt_init ? nlohmann::json(*c.flow.dt_init) : nlohmann::json(nullptr)},
               {"dt_min", c.flow.dt_min},
               {"dt_max", c.flow.dt_max},
               {"tol", c.flow.tol_residual},
               {"t_max", c.flow.t_max},
               {"descent_backtrack", c.flow.descent_backtrack},
               {"max_steps", c.flow.max_steps}};
  j["oracle"] = {{"enabled", c.oracle.enabled}, {"tol", c.oracle.tol}};
  j["probes"] = c.probes ? nlohmann::json(*c.probes) : nlohmann::json(nullptr);
  j["output"] = {{"dir", c.output.dir}, {"traces", c.output.traces}, {"trace_stride", c.output.trace_stride}};
  j["cheeger"] = {{"margin", c.cheeger.margin}};
  return j;
}

struct NewtonSummary {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> damping_history;
  double lazy_residual = 0.0;  // recomputed through the lazy operators
  double sup_diff_to_flow = 0.0;

  bool operator==(const NewtonSummary&) const = default;
};

// Converged f^k on V_k and its diagnostics.
struct LevelSolution {
  int k = 0;
  std::vector<std::string> vertex_ids;
  std::vector<double> values;
  bool converged = false;
  double residual = 0.0;
  double lazy_residual = 0.0;
  double energy = 0.0;
  double estimate_lhs = 0.0;
  double l2_mass = 0.0;           // int (f^k)^2
  double weighted_l2_mass = 0.0;  // int (f^k)^2 |h|
  std::optional<double> c1_bound; // 4 int_{V_k} |h| psi^2
  double positivity_min = 0.0;
  std::string solver;
  std::string regime;
  std::size_t flow_steps = 0;
  double flow_time = 0.0;
  double velocity_ceiling = 0.0;
  double max_velocity_seen = 0.0;
  std::optional<double> max_energy_change;
  double max_energy_rise = 0.0;
  std::optional<NewtonSummary> newton;
  std::optional<double> lambda_1;
  std::string error;

  bool operator==(const LevelSolution&) const = default;
};

struct ProbeSeries {
  std::string probe;
  std::vector<double> values;        // f^k(probe), zero extension when outside V_k
  std::vector<bool> in_level;
  std::vector<double> cauchy_gaps;   // |f^{k+1} - f^k| at the probe
  double limit_estimate = 0.0;       // value at the deepest level
  bool interior = false;             // in V_K with phi_K = 0
  std::optional<double> global_residual;  // |Delta f + h e^f - g|, full Laplacian
  bool splice_exact = false;         // Delta_K f = Delta f and phi_K = 0 bitwise
  bool stabilized = false;           // gap < 1e-6 over the last three levels

  bool operator==(const ProbeSeries&) const = default;
};

struct LimitReport {
  std::vector<std::string> probe_vertices;
  std::vector<ProbeSeries> per_probe;

  bool operator==(const LimitReport&) const = default;
};

struct BoundsReport {
  bool estimate_ok = true;  // every level's estimate <= 1e-8
  bool c1_applicable = false;
  std::optional<double> c1_total_bound;
  bool c1_positivity_ok = true;
  bool c1_l2_ok = true;        // int (f^k)^2 <= c1 bound of the level
  bool c1_weighted_ok = true;  // int (f^k)^2 |h| <= c1 bound of the level
  bool c2_applicable = false;
  std::optional<double> c2_uniform_bound;
  double lambda_floor = 0.0;
  double h_L1_used = 0.0;
  double g_L2_used = 0.0;
  bool c2_l2_ok = true;

  bool operator==(const BoundsReport&) const = default;
};

struct SolveResult {
  int schema_version = kSchemaVersion;
  nlohmann::json config;
  HypothesisReport hypotheses;
  CheegerReport cheeger;
  std::vector<LevelSolution> levels;
  LimitReport limit;
  BoundsReport bounds;
  std::vector<int> nonconverged_levels;
  int exit_code = exit_ok;

  bool operator==(const SolveResult&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NewtonSummary, iterations, final_residual, converged, damping_history,
                                   lazy_residual, sup_diff_to_flow)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LevelSolution, k, vertex_ids, values, converged, residual, lazy_residual, energy,
                                   estimate_lhs, l2_mass, weighted_l2_mass, c1_bound, positivity_min, solver, regime,
                                   flow_steps, flow_time, velocity_ceiling, max_velocity_seen, max_energy_change,
                                   max_energy_rise, newton, lambda_1, error)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ProbeSeries, probe, values, in_level, cauchy_gaps, limit_estimate, interior,
                                   global_residual, splice_exact, stabilized)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LimitReport, probe_vertices, per_probe)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BoundsReport, estimate_ok, c1_applicable, c1_total_bound, c1_positivity_ok,
                                   c1_l2_ok, c1_weighted_ok, c2_applicable, c2_uniform_bound, lambda_floor,
                                   h_L1_used, g_L2_used, c2_l2_ok)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SolveResult, schema_version, config, hypotheses, cheeger, levels, limit, bounds,
                                   nonconverged_levels, exit_code)

struct TraceRow {
  double t, dt, energy, residual, min_f, max_f;
};

// Everything the pipeline produces; traces are written as CSV, not JSON.
struct SolveOutput {
  SolveResult result;
  std::vector<std::vector<TraceRow>> traces;  // per level, when enabled
};

// Graph, exhaustion and realised data for a config.
struct Problem {
  MeasuredGraph graph;
  Exhaustion exhaustion;
  VertexFunction g;
  VertexFunction h;
};

inline Problem prepare(const RunConfig& cfg) {
  MeasuredGraph graph = build_graph(cfg.graph);
  VertexIndex root = 0;
  if (cfg.root) {
    auto r = graph.find(*cfg.root);
    if (!r) throw SpecError("exhaustion root '" + *cfg.root + "' is not a vertex");
    root = *r;
  } else if (graph.origin()) {
    root = *graph.origin();
  }
  std::optional<Exhaustion> ex;
  try {
    ex.emplace(ball_exhaustion(graph, root, cfg.depth));
  } catch (const DomainError& e) {
    throw SpecError(e.what());
  }
  VertexFunction g = realize(graph, *ex, cfg.g);
  VertexFunction h = realize(graph, *ex, cfg.h);
  return Problem{std::move(graph), std::move(*ex), std::move(g), std::move(h)};
}

inline void require_nonpositive_h_everywhere(const Problem& p) {
  for (VertexIndex x = 0; x < p.graph.size(); ++x)
    if (p.h(x) > 0.0) throw HypothesisViolation("h > 0 at vertex '" + p.graph.id(x) + "'");
}

// max_x |Delta_k f - phi_k f + h e^f - g| through the per-vertex operators.
inline double lazy_residual(const OperatorContext& ctx, const VertexFunction& f, const VertexFunction& g,
                            const VertexFunction& h) {
  double m = 0.0;
  for (VertexIndex x : ctx.require_level().vertices) {
    const double r = laplacian(ctx, f, x) - phi_k(ctx, x) * f(x) + h(x) * std::exp(f(x)) - g(x);
    m = std::max(m, std::abs(r));
  }
  return m;
}

namespace detail {

struct LevelJob {
  LevelSolution solution;
  std::vector<TraceRow> trace;
  VertexFunction f;  // flow solution, for the limit report
  std::optional<CheegerLevel> gap;
  bool ok = false;
};

inline LevelJob solve_level(const Problem& p, const RunConfig& cfg, const Level& lv) {
  LevelJob job;
  LevelSolution& s = job.solution;
  s.k = lv.k;
  s.solver = cfg.oracle.enabled ? "both" : "flow";
  const OperatorContext ctx(p.graph, lv);
  try {
    std::size_t counter = 0;
    FlowObserver observer;
    if (cfg.output.traces) {
      observer = [&](const StepOutcome& o) {
        if (counter++ % cfg.output.trace_stride != 0) return;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (VertexIndex x : lv.vertices) {
          lo = std::min(lo, o.state.f(x));
          hi = std::max(hi, o.state.f(x));
        }
        job.trace.push_back({o.state.t, o.dt_used, o.state.energy, o.state.residual, lo, hi});
      };
    }
    FlowResult fr = relax(ctx, p.g, p.h, cfg.flow, observer);
    s.converged = fr.converged;
    s.residual = fr.residual;
    s.energy = fr.energy;
    s.estimate_lhs = fr.estimate;
    s.regime = fr.regime == Regime::h_zero ? "h-zero" : "h-nonzero";
    s.flow_steps = fr.steps;
    s.flow_time = fr.t;
    s.velocity_ceiling = fr.velocity_ceiling;
    s.max_velocity_seen = fr.max_velocity_seen;
    if (fr.steps > 0 && std::isfinite(fr.max_energy_change)) s.max_energy_change = fr.max_energy_change;
    s.max_energy_rise = fr.max_energy_rise;
    s.lazy_residual = lazy_residual(ctx, fr.f, p.g, p.h);

    double psi_mass = 0.0;
    bool h_negative = true;
    s.positivity_min = std::numeric_limits<double>::infinity();
    for (VertexIndex x : lv.vertices) {
      const double f = fr.f(x), mu = p.graph.mu(x), h = p.h(x);
      s.vertex_ids.push_back(p.graph.id(x));
      s.values.push_back(f);
      s.l2_mass += f * f * mu;
      s.weighted_l2_mass += f * f * std::abs(h) * mu;
      s.positivity_min = std::min(s.positivity_min, f);
      if (h < 0.0)
        psi_mass += p.g(x) * p.g(x) / std::abs(h) * mu;
      else
        h_negative = false;
    }
    if (h_negative) s.c1_bound = 4.0 * psi_mass;

    if (cfg.oracle.enabled) {
      NewtonOptions opts;
      opts.tol = cfg.oracle.tol;
      NewtonReport nr = newton_solve(ctx, p.g, p.h, opts);
      NewtonSummary ns;
      ns.iterations = nr.iterations;
      ns.final_residual = nr.final_residual;
      ns.converged = nr.converged;
      ns.damping_history = nr.damping_history;
      ns.lazy_residual = lazy_residual(ctx, nr.f_star, p.g, p.h);
      for (VertexIndex x : lv.vertices)
        ns.sup_diff_to_flow = std::max(ns.sup_diff_to_flow, std::abs(nr.f_star(x) - fr.f(x)));
      s.newton = ns;
    }
    job.gap = cheeger_level(p.graph, lv, cfg.cheeger.spectral);
    s.lambda_1 = job.gap->lambda_1;
    job.f = std::move(fr.f);
    job.ok = true;
  } catch (const NumericalError& e) {
    s.converged = false;
    s.error = e.what();
  }
  return job;
}

// Runs fn(i) for i in [0, n) on a small worker pool; results must be written
// to per-index slots. The first exception is rethrown after the join.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline LimitReport limit_report(const Problem& p, const RunConfig& cfg, const std::vector<LevelJob>& jobs) {
  const Exhaustion& ex = p.exhaustion;
  const Level& top = ex.level(ex.depth());
  const OperatorContext top_ctx(p.graph, top);
  auto interior = [&](VertexIndex x) { return top.contains(x) && phi_k(top_ctx, x) == 0.0; };

  std::vector<VertexIndex> probes;
  if (cfg.probes) {
    for (const auto& id : *cfg.probes) {
      auto x = p.graph.find(id);
      if (!x) throw SpecError("probe '" + id + "' is not a vertex");
      if (!interior(*x)) throw SpecError("probe '" + id + "' is never an interior vertex of the exhaustion");
      probes.push_back(*x);
    }
  } else {
    probes.push_back(ex.root());
    for (VertexIndex y : p.graph.neighbors(ex.root()))
      if (top.contains(y)) probes.push_back(y);
  }

  LimitReport rep;
  for (VertexIndex x : probes) {
    ProbeSeries s;
    s.probe = p.graph.id(x);
    rep.probe_vertices.push_back(s.probe);
    for (const auto& job : jobs) {
      const Level& lv = ex.level(job.solution.k);
      s.in_level.push_back(lv.contains(x));
      s.values.push_back(job.ok ? job.f(x) : 0.0);
    }
    for (std::size_t i = 1; i < s.values.size(); ++i) s.cauchy_gaps.push_back(std::abs(s.values[i] - s.values[i - 1]));
    s.limit_estimate = s.values.empty() ? 0.0 : s.values.back();
    s.interior = interior(x);
    if (s.interior && !jobs.empty() && jobs.back().ok) {
      const VertexFunction& f = jobs.back().f;
      const OperatorContext full(p.graph);
      const double lap_full = laplacian(full, f, x);
      s.splice_exact = laplacian(top_ctx, f, x) == lap_full && phi_k(top_ctx, x) == 0.0;
      s.global_residual = std::abs(lap_full + p.h(x) * std::exp(f(x)) - p.g(x));
    }
    if (s.cauchy_gaps.size() >= 3)
      s.stabilized = std::all_of(s.cauchy_gaps.end() - 3, s.cauchy_gaps.end(), [](double d) { return d < 1e-6; });
    rep.per_probe.push_back(std::move(s));
  }
  return rep;
}

inline BoundsReport check_bounds(const SolveResult& r) {
  BoundsReport b;
  for (const auto& lv : r.levels)
    if (lv.error.empty() && lv.estimate_lhs > 1e-8) b.estimate_ok = false;

  b.c1_applicable = holds(r.hypotheses.c1.verdict);
  if (auto t = r.hypotheses.c1.psi2h.total()) b.c1_total_bound = 4.0 * *t;
  for (const auto& lv : r.levels) {
    if (!lv.error.empty()) continue;
    if (lv.positivity_min < -1e-10) b.c1_positivity_ok = false;
    if (lv.c1_bound) {
      if (lv.l2_mass > *lv.c1_bound + 1e-8) b.c1_l2_ok = false;
      if (lv.weighted_l2_mass > *lv.c1_bound + 1e-8) b.c1_weighted_ok = false;
    } else {
      b.c1_l2_ok = b.c1_weighted_ok = false;
    }
  }

  // From the estimate and the Dirichlet gap lambda:
  //   (lambda/2) X^2 <= H + G X,  X = ||f^k||_2,
  // so X <= (G + sqrt(G^2 + 2 lambda H)) / lambda, uniformly in k.
  b.c2_applicable = holds(r.hypotheses.c2.verdict);
  const auto& c2 = r.hypotheses.c2;
  b.h_L1_used = c2.h_L1.total().value_or(c2.h_L1.partial);
  b.g_L2_used = std::sqrt(c2.g_L2_squared.total().value_or(c2.g_L2_squared.partial));
  b.lambda_floor = std::numeric_limits<double>::infinity();
  for (const auto& lv : r.levels)
    if (lv.lambda_1) b.lambda_floor = std::min(b.lambda_floor, *lv.lambda_1);
  if (!std::isfinite(b.lambda_floor)) b.lambda_floor = 0.0;
  if (b.lambda_floor > 0.0) {
    const double G = b.g_L2_used, H = b.h_L1_used, lam = b.lambda_floor;
    const double x = (G + std::sqrt(G * G + 2.0 * lam * H)) / lam;
    b.c2_uniform_bound = x * x;
    for (const auto& lv : r.levels)
      if (lv.error.empty() && lv.l2_mass > *b.c2_uniform_bound + 1e-8) b.c2_l2_ok = false;
  } else {
    b.c2_l2_ok = false;
  }
  return b;
}

}  // namespace detail

// Full pipeline: per-level flow (and Newton oracle), Dirichlet gaps,
// hypothesis checks, a-priori bounds and the probe limit report.
inline SolveOutput solve_kw(const RunConfig& cfg) {
  const Problem p = prepare(cfg);
  require_nonpositive_h_everywhere(p);

  const int K = p.exhaustion.depth();
  std::vector<detail::LevelJob> jobs(static_cast<std::size_t>(K));
  detail::parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    jobs[i] = detail::solve_level(p, cfg, p.exhaustion.level(static_cast<int>(i) + 1));
  });

  SolveOutput out;
  SolveResult& r = out.result;
  r.config = run_config_to_json(cfg);

  std::vector<CheegerLevel> gaps;
  for (const auto& job : jobs) {
    r.levels.push_back(job.solution);
    out.traces.push_back(job.trace);
    if (!job.solution.converged) r.nonconverged_levels.push_back(job.solution.k);
  }
  for (int k = 1; k <= K; ++k) {
    const auto& job = jobs[static_cast<std::size_t>(k - 1)];
    gaps.push_back(job.gap ? *job.gap : cheeger_level(p.graph, p.exhaustion.level(k), cfg.cheeger.spectral));
  }
  r.cheeger = detail::classify(std::move(gaps), cfg.cheeger);
  r.hypotheses = check_hypotheses(p.graph, p.exhaustion, cfg.g, cfg.h, K, r.cheeger);
  r.limit = detail::limit_report(p, cfg, jobs);
  r.bounds = detail::check_bounds(r);
  r.exit_code = r.nonconverged_levels.empty() ? exit_ok : exit_nonconvergence;
  return out;
}

}  // namespace kwg

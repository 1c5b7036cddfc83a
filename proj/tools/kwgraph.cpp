// kwgraph: command-line front end for the exhaustion solver.
//
//   kwgraph solve      --config run.json [--depth N] [--tol X] [--out DIR]
//   kwgraph check      --config run.json
//   kwgraph cheeger    --config run.json
//   kwgraph oracle     --config run.json [--level K]
//   kwgraph flow-trace --config run.json [--level K] [--out DIR]
//   kwgraph fuzz       --seed N [--count M]
//
// Exit codes: 0 ok, 2 hypothesis violation, 3 non-convergence, 4 spec error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kwgraph/kwgraph.hpp"
#include "kwgraph/random_graph.hpp"

namespace {

using nlohmann::json;

struct Common {
  std::string config;
  std::optional<int> depth;
  std::optional<double> tol;
  std::optional<std::string> out;
};

kwg::RunConfig load(const Common& c) {
  std::ifstream in(c.config);
  if (!in) throw kwg::SpecError("cannot read config '" + c.config + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw kwg::SpecError("config '" + c.config + "' is not valid JSON: " + e.what());
  }
  if (c.depth) j["exhaustion"]["depth"] = *c.depth;
  if (c.tol) j["flow"]["tol"] = *c.tol;
  if (c.out) j["output"]["dir"] = *c.out;
  return kwg::parse_run_config(j);
}

int level_or_depth(const kwg::Problem& p, std::optional<int> level) {
  const int k = level.value_or(p.exhaustion.depth());
  if (k < 1 || k > p.exhaustion.depth())
    throw kwg::SpecError("level " + std::to_string(k) + " outside 1.." + std::to_string(p.exhaustion.depth()));
  return k;
}

int cmd_solve(const Common& c) {
  const kwg::RunConfig cfg = load(c);
  const kwg::SolveOutput out = kwg::solve_kw(cfg);
  kwg::emit_reports(out, cfg.output.dir);
  const auto& r = out.result;
  for (const auto& lv : r.levels)
    std::printf("level %2d  |V|=%-6zu residual=%.3e  J=%.12g  %s\n", lv.k, lv.values.size(), lv.residual,
                lv.energy, lv.converged ? "converged" : "NOT converged");
  std::printf("theorem: %s  cheeger: %s\n", kwg::applicability_name(r.hypotheses.theorem_applicable),
              kwg::verdict_name(r.cheeger.verdict));
  std::printf("wrote %s\n", (std::filesystem::path(cfg.output.dir) / "result.json").string().c_str());
  return r.exit_code;
}

int cmd_check(const Common& c) {
  const kwg::RunConfig cfg = load(c);
  const kwg::Problem p = kwg::prepare(cfg);
  const auto cheeger = kwg::cheeger_scan(p.graph, p.exhaustion, p.exhaustion.depth(), cfg.cheeger);
  const auto rep = kwg::check_hypotheses(p.graph, p.exhaustion, cfg.g, cfg.h, p.exhaustion.depth(), cheeger);
  json j = rep;
  if (cfg.g.preset == kwg::Preset::constant)
    j["constant_g"] =
        kwg::check_constant_g(p.graph, p.exhaustion, cfg.g.a, cfg.h, p.exhaustion.depth(), cheeger);
  std::cout << j.dump(2) << '\n';
  return rep.theorem_applicable == kwg::Applicability::neither ? kwg::exit_hypothesis : kwg::exit_ok;
}

int cmd_cheeger(const Common& c) {
  const kwg::RunConfig cfg = load(c);
  const kwg::Problem p = kwg::prepare(cfg);
  const auto rep = kwg::cheeger_scan(p.graph, p.exhaustion, p.exhaustion.depth(), cfg.cheeger);
  std::cout << json(rep).dump(2) << '\n';
  return kwg::exit_ok;
}

int cmd_oracle(const Common& c, std::optional<int> level) {
  const kwg::RunConfig cfg = load(c);
  const kwg::Problem p = kwg::prepare(cfg);
  const kwg::Level& lv = p.exhaustion.level(level_or_depth(p, level));
  const kwg::OperatorContext ctx(p.graph, lv);
  kwg::NewtonOptions opts;
  opts.tol = cfg.oracle.tol;
  const auto r = kwg::newton_solve(ctx, p.g, p.h, opts);
  json j;
  j["k"] = lv.k;
  j["iterations"] = r.iterations;
  j["final_residual"] = r.final_residual;
  j["lazy_residual"] = kwg::lazy_residual(ctx, r.f_star, p.g, p.h);
  j["converged"] = r.converged;
  j["damping_history"] = r.damping_history;
  json values = json::object();
  for (auto x : lv.vertices) values[p.graph.id(x)] = r.f_star(x);
  j["f"] = values;
  std::cout << j.dump(2) << '\n';
  return r.converged ? kwg::exit_ok : kwg::exit_nonconvergence;
}

int cmd_flow_trace(const Common& c, std::optional<int> level) {
  const kwg::RunConfig cfg = load(c);
  const kwg::Problem p = kwg::prepare(cfg);
  const kwg::Level& lv = p.exhaustion.level(level_or_depth(p, level));
  const kwg::OperatorContext ctx(p.graph, lv);
  std::vector<kwg::TraceRow> rows;
  const auto r = kwg::relax(ctx, p.g, p.h, cfg.flow, [&](const kwg::StepOutcome& o) {
    double lo = INFINITY, hi = -INFINITY;
    for (auto x : lv.vertices) {
      lo = std::min(lo, o.state.f(x));
      hi = std::max(hi, o.state.f(x));
    }
    rows.push_back({o.state.t, o.dt_used, o.state.energy, o.state.residual, lo, hi});
  });
  const std::filesystem::path dir = std::filesystem::path(cfg.output.dir) / "traces";
  std::filesystem::create_directories(dir);
  const auto file = dir / ("level_" + std::to_string(lv.k) + ".csv");
  kwg::write_trace_csv(file, rows);
  std::printf("level %d: %zu steps, t=%.6g, residual=%.3e, %s\nwrote %s\n", lv.k, r.steps, r.t, r.residual,
              r.converged ? "converged" : "NOT converged", file.string().c_str());
  return r.converged ? kwg::exit_ok : kwg::exit_nonconvergence;
}

double rel(const kwg::IdentitySides& s) {
  return std::abs(s.lhs - s.rhs) / std::max({1.0, std::abs(s.lhs), std::abs(s.rhs)});
}

// Operator identities on random graphs and random compactly supported f.
int cmd_fuzz(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  double worst_green = 0, worst_split = 0, worst_dirichlet = 0;
  for (int i = 0; i < count; ++i) {
    const kwg::MeasuredGraph g = kwg::random_graph(rng);
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    const auto root = pick(rng);
    const auto ex = kwg::ball_exhaustion(g, root, 1 + static_cast<int>(rng() % 3));
    const kwg::Level& lv = ex.level(ex.depth());
    kwg::VertexFunction f = kwg::VertexFunction::on_level(g, lv);
    for (auto x : lv.vertices) f.set(x, val(rng));
    const kwg::OperatorContext ctx(g, lv), full(g);
    worst_green = std::max(worst_green, rel(kwg::green_check(ctx, f)));
    worst_dirichlet = std::max(worst_dirichlet, rel(kwg::dirichlet_identity(ctx, f)));
    for (auto x : lv.vertices) {
      const double a = kwg::laplacian(full, f, x);
      const double b = kwg::laplacian(ctx, f, x) - kwg::phi_k(ctx, x) * f(x);
      worst_split = std::max(worst_split, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
    }
  }
  const bool ok = worst_green <= 1e-12 && worst_split <= 1e-12 && worst_dirichlet <= 1e-12;
  std::printf("seed %llu, %d graphs: green %.2e  split %.2e  dirichlet %.2e  %s\n",
              static_cast<unsigned long long>(seed), count, worst_green, worst_split, worst_dirichlet,
              ok ? "ok" : "FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kazdan-Warner solver on weighted graphs by exhaustion and heat-flow relaxation"};
  app.require_subcommand(1);

  Common common;
  std::optional<int> level;
  std::uint64_t seed = 1;
  int count = 200;

  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config", common.config, "run config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--depth", common.depth, "exhaustion depth override")->check(CLI::PositiveNumber);
    sub->add_option("--tol", common.tol, "flow residual tolerance override")->check(CLI::PositiveNumber);
    if (with_out) sub->add_option("--out", common.out, "output directory override");
  };

  auto* solve = app.add_subcommand("solve", "full pipeline, writes result.json and CSVs");
  add_common(solve, true);
  auto* check = app.add_subcommand("check", "hypothesis report only");
  add_common(check, false);
  auto* cheeger = app.add_subcommand("cheeger", "Dirichlet spectral scan only");
  add_common(cheeger, false);
  auto* oracle = app.add_subcommand("oracle", "Newton solve of one level");
  add_common(oracle, false);
  oracle->add_option("--level", level, "level (default: deepest)");
  auto* trace = app.add_subcommand("flow-trace", "one level with a full flow trace");
  add_common(trace, true);
  trace->add_option("--level", level, "level (default: deepest)");
  auto* fuzz = app.add_subcommand("fuzz", "operator identities on random graphs");
  fuzz->add_option("--seed", seed, "RNG seed");
  fuzz->add_option("--count", count, "number of graphs")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kwg::exit_spec;
  }

  try {
    if (*solve) return cmd_solve(common);
    if (*check) return cmd_check(common);
    if (*cheeger) return cmd_cheeger(common);
    if (*oracle) return cmd_oracle(common, level);
    if (*trace) return cmd_flow_trace(common, level);
    if (*fuzz) return cmd_fuzz(seed, count);
  } catch (const kwg::HypothesisViolation& e) {
    std::cerr << "hypothesis violation: " << e.what() << '\n';
    return kwg::exit_hypothesis;
  } catch (const kwg::SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return kwg::exit_spec;
  } catch (const kwg::DomainError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return kwg::exit_spec;
  } catch (const kwg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kwg::exit_nonconvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

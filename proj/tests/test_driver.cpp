#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "kwgraph/kwgraph.hpp"

using nlohmann::json;

namespace {

json z_config(int depth) {
  json j = json::parse(R"({
    "graph": {"family": "lattice", "params": {"dim": 1}, "truncation_depth": 9},
    "g": {"preset": "geom", "params": {"a": -2, "r": 0.5}},
    "h": {"preset": "geom", "params": {"a": -1, "r": 0.5}},
    "output": {"dir": "unused"}
  })");
  j["exhaustion"]["depth"] = depth;
  return j;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(RunConfig, RoundTripsThroughJson) {
  json j = z_config(5);
  j["probes"] = {"0", "-1"};
  j["flow"] = {{"tol", 1e-10}, {"dt", 0.01}};
  const auto c = kwg::parse_run_config(j);
  EXPECT_EQ(c.depth, 5);
  EXPECT_EQ(c.flow.tol_residual, 1e-10);
  ASSERT_TRUE(c.flow.dt_init);
  const auto c2 = kwg::parse_run_config(kwg::run_config_to_json(c));
  EXPECT_EQ(kwg::run_config_to_json(c2), kwg::run_config_to_json(c));
  EXPECT_EQ(c2.g, c.g);
  EXPECT_EQ(c2.probes, c.probes);
}

TEST(RunConfig, RejectsBadDocuments) {
  EXPECT_THROW(kwg::parse_run_config(json::array()), kwg::SpecError);
  json j = z_config(3);
  j.erase("h");
  EXPECT_THROW(kwg::parse_run_config(j), kwg::SpecError);
  j = z_config(0);
  EXPECT_THROW(kwg::parse_run_config(j), kwg::SpecError);
  j = z_config(3);
  j["g"] = {{"preset", "wavy"}};
  EXPECT_THROW(kwg::parse_run_config(j), kwg::SpecError);
  j = z_config(3);
  j["flow"] = {{"descent_backtrack", 2.0}};
  EXPECT_THROW(kwg::parse_run_config(j), kwg::SpecError);
}

TEST(SolveKw, DepthBeyondTruncationIsASpecError) {
  EXPECT_THROW(kwg::solve_kw(kwg::parse_run_config(z_config(9))), kwg::SpecError);
}

TEST(SolveKw, PositiveHIsAHypothesisViolation) {
  json j = z_config(3);
  j["h"] = {{"preset", "const"}, {"params", {{"c", 0.25}}}};
  EXPECT_THROW(kwg::solve_kw(kwg::parse_run_config(j)), kwg::HypothesisViolation);
}

TEST(SolveKw, ExactSolutionWhenGEqualsH) {
  json j = z_config(4);
  j["g"] = j["h"];
  const auto out = kwg::solve_kw(kwg::parse_run_config(j));
  for (const auto& lv : out.result.levels) {
    EXPECT_TRUE(lv.converged);
    EXPECT_EQ(lv.residual, 0.0);
    for (double v : lv.values) EXPECT_EQ(v, 0.0);
  }
  for (const auto& p : out.result.limit.per_probe) {
    EXPECT_EQ(p.limit_estimate, 0.0);
    ASSERT_TRUE(p.global_residual);
    EXPECT_EQ(*p.global_residual, 0.0);
  }
  EXPECT_EQ(out.result.exit_code, 0);
}

TEST(SolveKw, IntegerScenarioBoundsAndLimit) {
  json j = z_config(8);
  j["probes"] = {"0"};
  const auto r = kwg::solve_kw(kwg::parse_run_config(j)).result;
  EXPECT_EQ(r.hypotheses.theorem_applicable, kwg::Applicability::c1);
  EXPECT_TRUE(r.bounds.c1_applicable);
  EXPECT_TRUE(r.bounds.c1_positivity_ok);
  EXPECT_TRUE(r.bounds.c1_l2_ok);
  EXPECT_TRUE(r.bounds.estimate_ok);
  ASSERT_TRUE(r.bounds.c1_total_bound);
  EXPECT_NEAR(*r.bounds.c1_total_bound, 48.0, 1e-12);
  for (const auto& lv : r.levels) EXPECT_LE(lv.l2_mass, 48.0);
  ASSERT_EQ(r.limit.per_probe.size(), 1u);
  const auto& p = r.limit.per_probe[0];
  EXPECT_EQ(p.values.size(), 8u);
  for (std::size_t i = 1; i < p.cauchy_gaps.size(); ++i) EXPECT_LT(p.cauchy_gaps[i], p.cauchy_gaps[i - 1]);
  EXPECT_TRUE(p.splice_exact);
  ASSERT_TRUE(p.global_residual);
  EXPECT_LE(*p.global_residual, 1e-6);
}

TEST(SolveKw, ProbesOutsideEarlyLevelsAreFlagged) {
  json j = z_config(6);
  j["probes"] = {"0", "4"};
  const auto r = kwg::solve_kw(kwg::parse_run_config(j)).result;
  ASSERT_EQ(r.limit.per_probe.size(), 2u);
  const auto& far = r.limit.per_probe[1];
  ASSERT_EQ(far.values.size(), 6u);
  for (int k = 1; k <= 6; ++k) {
    EXPECT_EQ(far.in_level[static_cast<std::size_t>(k - 1)], k >= 4);
    if (k < 4) {
      EXPECT_EQ(far.values[static_cast<std::size_t>(k - 1)], 0.0);
    }
  }
}

TEST(SolveKw, ProbeNeverInteriorIsRejected) {
  json j = z_config(3);
  j["probes"] = {"3"};  // on the top level but next to its boundary
  EXPECT_THROW(kwg::solve_kw(kwg::parse_run_config(j)), kwg::SpecError);
  j["probes"] = {"nowhere"};
  EXPECT_THROW(kwg::solve_kw(kwg::parse_run_config(j)), kwg::SpecError);
}

TEST(SolveKw, EmptyProbeListGivesValidReport) {
  json j = z_config(3);
  j["probes"] = json::array();
  const auto out = kwg::solve_kw(kwg::parse_run_config(j));
  EXPECT_TRUE(out.result.limit.per_probe.empty());
  const auto text = kwg::result_to_string(out.result);
  EXPECT_TRUE(json::accept(text));
}

TEST(SolveKw, ResultRoundTripsThroughJson) {
  json j = z_config(4);
  j["flow"] = {{"dt", 0.05}};
  const auto r = kwg::solve_kw(kwg::parse_run_config(j)).result;
  const auto back = kwg::result_from_string(kwg::result_to_string(r));
  EXPECT_EQ(back, r);
  EXPECT_EQ(kwg::result_to_string(back), kwg::result_to_string(r));
}

TEST(SolveKw, ThreadCountDoesNotChangeResults) {
  json j = z_config(6);
  j["threads"] = 1;
  const auto a = kwg::solve_kw(kwg::parse_run_config(j)).result;
  j["threads"] = 4;
  const auto b = kwg::solve_kw(kwg::parse_run_config(j)).result;
  EXPECT_EQ(kwg::result_to_string(a), kwg::result_to_string(b));
}

TEST(EmitReports, WritesFilesDeterministically) {
  const auto dir = std::filesystem::temp_directory_path() / "kwgraph_emit_test";
  std::filesystem::remove_all(dir);
  json j = z_config(3);
  j["output"] = {{"dir", dir.string()}, {"traces", true}, {"trace_stride", 2}};
  const auto cfg = kwg::parse_run_config(j);
  kwg::emit_reports(kwg::solve_kw(cfg), dir / "a");
  kwg::emit_reports(kwg::solve_kw(cfg), dir / "b");
  for (const char* f : {"result.json", "plot_data.csv", "traces/level_1.csv", "traces/level_3.csv"}) {
    ASSERT_TRUE(std::filesystem::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  const auto trace = slurp(dir / "a" / "traces/level_2.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "t,dt,J_k,residual,min_f,max_f");
  std::filesystem::remove_all(dir);
}

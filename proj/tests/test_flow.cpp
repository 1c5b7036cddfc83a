#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "kwgraph/flow.hpp"
#include "kwgraph/generators.hpp"
#include "kwgraph/newton.hpp"
#include "oracles.hpp"

namespace {

// One interior vertex v (mu = 1) tied to an outside vertex u by weight phi,
// so that V_k = {v} has phi_k(v) = phi.
struct Single {
  kwg::MeasuredGraph g;
  kwg::Level lv;
  kwg::VertexIndex v;

  explicit Single(double phi) {
    oracle::RawGraph r;
    r.add("v", 1.0);
    r.add("u", 1.0);
    r.connect(0, 1, phi);
    g = r.build();
    v = g.index_of("v");
    lv = kwg::make_level(g, 1, {v});
  }
  kwg::VertexFunction value(double a) const {
    auto f = kwg::VertexFunction::on_level(g, lv);
    f.set(v, a);
    return f;
  }
};

struct Data {
  kwg::VertexFunction g, h;
};

Data geometric_data(const kwg::MeasuredGraph& G, const kwg::Exhaustion& ex, double hcoef, double gfactor) {
  Data d{kwg::VertexFunction(G.size()), kwg::VertexFunction(G.size())};
  for (kwg::VertexIndex x = 0; x < G.size(); ++x) {
    const double hx = hcoef * std::pow(0.5, ex.distance()[x]);
    d.h.set(x, hx);
    d.g.set(x, gfactor * hx);
  }
  return d;
}

}  // namespace

TEST(Energy, ZeroAtZero) {
  const auto G = kwg::make_lattice(1, 4);
  const auto ex = kwg::ball_exhaustion(G, "0", 2);
  const auto d = geometric_data(G, ex, -1.0, 2.0);
  const kwg::OperatorContext ctx(G, ex.level(2));
  EXPECT_EQ(kwg::energy(ctx, kwg::VertexFunction::on_level(G, ex.level(2)), d.g, d.h), 0.0);
}

TEST(Energy, SingleVertexValue) {
  Single s(2.0);
  const auto g = kwg::VertexFunction::constant(s.g, -1.0), h = kwg::VertexFunction::constant(s.g, -1.0);
  const double J = kwg::energy(kwg::OperatorContext(s.g, s.lv), s.value(1.0), g, h);
  EXPECT_NEAR(J, -1.0 + (std::exp(1.0) - 1.0) + 1.0, 1e-15);
  EXPECT_NEAR(J, 1.718281828459045, 1e-15);
}

TEST(Energy, PureGradientOnIntegers) {
  const auto G = kwg::make_lattice(1, 3);
  const auto ex = kwg::ball_exhaustion(G, "0", 1);
  auto f = kwg::VertexFunction::on_level(G, ex.level(1));
  f.set(G.index_of("0"), 1.0);
  const kwg::VertexFunction zero(G.size());
  EXPECT_DOUBLE_EQ(kwg::energy(kwg::OperatorContext(G, ex.level(1)), f, zero, zero), 1.0);
}

TEST(Energy, MatchesOracleOnRandomGraphs) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> val(-1.5, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw = oracle::random_raw(rng, 40);
    const auto G = raw.build();
    const auto to_g = raw.map_into(G);
    const std::size_t root = rng() % raw.size();
    const auto S = oracle::ball(raw, root, 2);
    const auto ex = kwg::ball_exhaustion(G, to_g[root], 2);
    oracle::Values f(raw.size(), 0.0), g(raw.size(), 0.0), h(raw.size(), 0.0);
    kwg::VertexFunction F = kwg::VertexFunction::on_level(G, ex.level(2)), Gf(G.size()), H(G.size());
    for (std::size_t x = 0; x < raw.size(); ++x) {
      g[x] = val(rng);
      h[x] = -std::abs(val(rng));
      Gf.set(to_g[x], g[x]);
      H.set(to_g[x], h[x]);
      if (S.count(x)) {
        f[x] = val(rng);
        F.set(to_g[x], f[x]);
      }
    }
    const double J = kwg::energy(kwg::OperatorContext(G, ex.level(2)), F, Gf, H);
    EXPECT_NEAR(J, oracle::energy(raw, S, f, g, h), 1e-11 * std::max(1.0, std::abs(J)));
  }
}

TEST(FlowStep, StationaryInputOnlyAdvancesTime) {
  Single s(1.0);
  const auto g = kwg::VertexFunction::constant(s.g, -1.0), h = kwg::VertexFunction::constant(s.g, -1.0);
  const kwg::OperatorContext ctx(s.g, s.lv);
  kwg::FlowConfig cfg;
  const auto st = kwg::initial_state(ctx, g, h, cfg);
  EXPECT_EQ(st.residual, 0.0);
  const auto out = kwg::flow_step(st, cfg, ctx, g, h);
  EXPECT_EQ(out.state.f, st.f);
  EXPECT_EQ(out.state.energy, st.energy);
  EXPECT_GT(out.state.t, st.t);
}

TEST(Relax, SingleVertexMatchesBisection) {
  Single s(1.0);
  const auto g = kwg::VertexFunction::constant(s.g, -3.0), h = kwg::VertexFunction::constant(s.g, -1.0);
  const auto r = kwg::relax(kwg::OperatorContext(s.g, s.lv), g, h, kwg::FlowConfig{});
  const double root = oracle::bisect([](double f) { return -f - std::exp(f) + 3.0; }, 0.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(root, 0.79206, 1e-5);
  EXPECT_NEAR(r.f(s.v), root, 1e-9);
}

TEST(Relax, ExactSolutionWhenGEqualsH) {
  const auto G = kwg::make_tree(3, 4);
  const auto ex = kwg::ball_exhaustion(G, "r", 3);
  const auto d = geometric_data(G, ex, -2.0, 1.0);
  const auto r = kwg::relax(kwg::OperatorContext(G, ex.level(3)), d.g, d.h, kwg::FlowConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.steps, 0u);
  EXPECT_EQ(r.residual, 0.0);
  for (auto x : ex.level(3).vertices) EXPECT_EQ(r.f(x), 0.0);
}

TEST(Relax, IntegerLevelTwoEstimatePositivityAndOracle) {
  const auto G = kwg::make_lattice(1, 4);
  const auto ex = kwg::ball_exhaustion(G, "0", 2);
  const auto d = geometric_data(G, ex, -1.0, 2.0);
  const kwg::OperatorContext ctx(G, ex.level(2));
  const auto r = kwg::relax(ctx, d.g, d.h, kwg::FlowConfig{});
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.estimate, 0.0);
  for (auto x : ex.level(2).vertices) EXPECT_GE(r.f(x), 0.0);
  const auto n = kwg::newton_solve(ctx, d.g, d.h);
  ASSERT_TRUE(n.converged);
  for (auto x : ex.level(2).vertices) EXPECT_NEAR(r.f(x), n.f_star(x), 1e-6);
}

TEST(Relax, RejectsPositiveH) {
  Single s(1.0);
  const auto g = kwg::VertexFunction::constant(s.g, 0.0), h = kwg::VertexFunction::constant(s.g, 0.5);
  EXPECT_THROW(kwg::relax(kwg::OperatorContext(s.g, s.lv), g, h, kwg::FlowConfig{}), kwg::HypothesisViolation);
}

TEST(Relax, ReportsPoissonRegime) {
  const auto G = kwg::make_lattice(1, 4);
  const auto ex = kwg::ball_exhaustion(G, "0", 2);
  const auto g = kwg::VertexFunction::constant(G, 0.3);
  const kwg::VertexFunction h(G.size());
  const auto r = kwg::relax(kwg::OperatorContext(G, ex.level(2)), g, h, kwg::FlowConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.regime, kwg::Regime::h_zero);
}

TEST(FlowConfig, Validation) {
  kwg::FlowConfig c;
  c.dt_init = 100.0;
  EXPECT_THROW(c.validate(), kwg::SpecError);
  c = {};
  c.descent_backtrack = 1.0;
  EXPECT_THROW(c.validate(), kwg::SpecError);
}

// Per-step energy descent, velocity max principle and the consistency of
// stored state along whole trajectories on random data with h <= 0.
TEST(FlowInvariants, RandomTrajectories) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto raw = oracle::random_raw(rng, 25);
    const auto G = raw.build();
    const auto root = static_cast<kwg::VertexIndex>(rng() % G.size());
    const auto ex = kwg::ball_exhaustion(G, root, 1 + static_cast<int>(rng() % 2));
    const auto& lv = ex.level(ex.depth());
    if (lv.boundary.empty()) continue;
    kwg::VertexFunction g(G.size()), h(G.size());
    for (kwg::VertexIndex x = 0; x < G.size(); ++x) {
      g.set(x, val(rng));
      h.set(x, -std::abs(val(rng)));
    }
    const kwg::OperatorContext ctx(G, lv);
    double ceiling = -1.0, last_J = 0.0;
    int seen = 0;
    const auto r = kwg::relax(ctx, g, h, kwg::FlowConfig{}, [&](const kwg::StepOutcome& o) {
      if (ceiling < 0.0) {
        ceiling = o.state.residual;
        last_J = o.state.energy;
        return;
      }
      ++seen;
      EXPECT_LE(o.energy_change, 0.0);
      EXPECT_LE(o.state.energy, last_J + 1e-12 * std::max(1.0, std::abs(last_J)));
      EXPECT_LE(o.state.residual, ceiling + 1e-8);
      last_J = o.state.energy;
      if (seen % 50 == 1) {
        EXPECT_NEAR(o.state.energy, kwg::energy(ctx, o.state.f, g, h), 1e-12 * std::max(1.0, std::abs(last_J)));
        const auto ft = kwg::velocity(ctx, o.state.f, g, h);
        for (auto x : lv.vertices) EXPECT_EQ(ft(x), o.state.f_t(x));
      }
    });
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.estimate, 1e-8);
    EXPECT_LE(r.max_velocity_seen, r.velocity_ceiling + 1e-8);
  }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cournot/bargaining.hpp"
#include "cournot/error.hpp"
#include "cournot/experiment.hpp"
#include "cournot/qlearning.hpp"
#include "oracle.hpp"

namespace cournot {
namespace {

MarketParams asym(double c_L, double c_H) {
  MarketParams m;
  m.c_L = c_L;
  m.c_H = c_H;
  return m;
}

const MarketParams kAsym1 = asym(16, 22);
const MarketParams kAsym3 = asym(10, 28);
const MarketParams kAsym6 = asym(1, 37);

// Frozen from oracle.hpp with a price step of 1e-6.
TEST(Frontier, FrozenAsym1) {
  EXPECT_NEAR(frontier_value(kAsym1, 700, 0).pi_H, 595.707628397537, 1e-6);
}

TEST(Frontier, MatchesBruteForce) {
  for (const auto& m : {kAsym1, kAsym3, kAsym6}) {
    for (double share : {0.1, 0.5, 0.9}) {
      const double pi_L = share * monopoly_profit(m, 0);
      EXPECT_NEAR(frontier_value(m, pi_L, 0).pi_H, oracle::frontier_H(m, pi_L, 1e-4), 1e-4);
    }
  }
}

TEST(Frontier, Endpoints) {
  EXPECT_NEAR(frontier_value(kAsym3, 0, 0).pi_H, 992.25, 1e-9);
  EXPECT_NEAR(frontier_value(kAsym3, monopoly_profit(kAsym3, 0), 0).pi_H, 0, 1e-6);
  EXPECT_THROW(frontier_value(kAsym3, monopoly_profit(kAsym3, 0) + 1, 0), Infeasible);
}

TEST(Frontier, SymmetricIsLinear) {
  const MarketParams sym;
  for (double pi : {0.0, 100.0, 648.0, 1000.0, 1296.0}) {
    EXPECT_NEAR(frontier_value(sym, pi, 0).pi_H, 1296 - pi, 1e-6);
  }
}

TEST(Frontier, SupportingQuantitiesReproduceProfits) {
  const auto fp = frontier_value(kAsym3, 800, 0);
  const auto o = outcome_unchecked(kAsym3, fp.q_L, fp.q_H);
  EXPECT_NEAR(o.pi_L, 800, 1e-6);
  EXPECT_NEAR(o.pi_H, fp.pi_H, 1e-6);
  EXPECT_NEAR(o.p, fp.p, 1e-9);
}

TEST(Frontier, Convex) {
  std::mt19937_64 rng(7);
  for (const auto& m : {kAsym1, kAsym3, kAsym6}) {
    std::uniform_real_distribution<double> u(0, monopoly_profit(m, 0));
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng), y = u(rng);
      const double mid = frontier_value(m, 0.5 * (x + y), 0).pi_H;
      const double chord = 0.5 * (frontier_value(m, x, 0).pi_H + frontier_value(m, y, 0).pi_H);
      EXPECT_LE(mid, chord + 1e-6);
    }
  }
}

TEST(Frontier, StrictlyDecreasing) {
  const double top = monopoly_profit(kAsym6, 0);
  double prev = frontier_value(kAsym6, 0, 0).pi_H;
  for (int i = 1; i <= 50; ++i) {
    const double next = frontier_value(kAsym6, top * i / 50, 0).pi_H;
    EXPECT_LT(next, prev);
    prev = next;
  }
}

TEST(Frontier, JointProfitBelowMonopoly) {
  for (const auto& set : builtin_param_sets(CostTable::kMain)) {
    const double top = monopoly_profit(set.params, 0);
    for (int i = 0; i <= 10; ++i) {
      const auto fp = frontier_value(set.params, top * i / 10, 0);
      EXPECT_LE(fp.pi_L + fp.pi_H, top + 1e-6);
    }
  }
}

TEST(Disagreement, MinMaxFrozen) {
  EXPECT_NEAR(minmax_disagreement(MarketParams{}).d_L, 182.25, 1e-9);
  EXPECT_NEAR(minmax_disagreement(kAsym6).d_H, 20.25, 1e-9);
  const auto d3 = minmax_disagreement(kAsym3);
  EXPECT_NEAR(d3.d_L, 324, 1e-9);
  EXPECT_NEAR(d3.d_H, 81, 1e-9);
  const auto d1 = minmax_disagreement(kAsym1);
  EXPECT_NEAR(d1.d_L, 225, 1e-9);
  EXPECT_NEAR(d1.d_H, 144, 1e-9);
}

TEST(Disagreement, MinMaxMatchesScan) {
  for (const auto& m : {kAsym1, kAsym3, kAsym6}) {
    const auto d = minmax_disagreement(m);
    EXPECT_NEAR(d.d_L, oracle::minmax_profit(m, m.c_L, 1e-4), 1e-6);
    EXPECT_NEAR(d.d_H, oracle::minmax_profit(m, m.c_H, 1e-4), 1e-6);
  }
}

TEST(Disagreement, GridVariant) {
  const auto grid = default_grid();
  const auto d = minmax_disagreement_on_grid(kAsym3, grid);
  // Against 45 the best grid replies are 18 (L: p = 28) and 9 (H: p = 37).
  EXPECT_DOUBLE_EQ(d.d_L, 324);
  EXPECT_DOUBLE_EQ(d.d_H, 81);
}

TEST(Disagreement, Nash) {
  const auto d = nash_disagreement(kAsym6);
  EXPECT_EQ(d.kind, DisagreementKind::kNash);
  EXPECT_DOUBLE_EQ(d.d_L, 1764);
  EXPECT_DOUBLE_EQ(d.d_H, 36);
}

TEST(Solvers, SymmetricDegeneracy) {
  const MarketParams sym;
  const auto mm = minmax_disagreement(sym);
  const auto ne = nash_disagreement(sym);
  for (const auto& fp : {solve_ks(sym, mm), solve_erg(sym, mm), solve_equal_split(sym),
                         solve_ks(sym, ne), solve_erg(sym, ne)}) {
    EXPECT_NEAR(fp.pi_L, 648, 1e-6);
    EXPECT_NEAR(fp.pi_H, 648, 1e-6);
  }
}

TEST(Solvers, KsFrozenAsym3) {
  const auto fp = solve_ks(kAsym3, minmax_disagreement(kAsym3));
  EXPECT_NEAR(fp.pi_L, 863.443690884756, 1e-6);
  EXPECT_NEAR(fp.pi_H, 454.461016766369, 1e-6);
}

TEST(Solvers, ErgFrozenAsym6) {
  const auto fp = solve_erg(kAsym6, nash_disagreement(kAsym6));
  EXPECT_NEAR(fp.pi_L, 1865.50172831571, 1e-6);
  EXPECT_NEAR(fp.pi_H, 38.0714638431777, 1e-6);
  EXPECT_NEAR(fp.pi_L / fp.pi_H, 49, 1e-9);
}

TEST(Solvers, ErgFrozenAsym1) {
  const auto fp = solve_erg(kAsym1, minmax_disagreement(kAsym1));
  EXPECT_NEAR(fp.pi_L, 799.383188666116, 1e-6);
  EXPECT_NEAR(fp.pi_H, 511.605240746314, 1e-6);
}

TEST(Solvers, EqualSplitFrozen) {
  const auto s6 = solve_equal_split(kAsym6);
  EXPECT_NEAR(s6.pi_L, 514.428631159026, 1e-6);
  EXPECT_NEAR(s6.pi_H, 514.428631159026, 1e-6);
  const auto s1 = solve_equal_split(kAsym1);
  EXPECT_NEAR(s1.pi_L, 643.530824790639, 1e-6);
  EXPECT_GT(s1.pi_L, 441);
  EXPECT_LT(s1.pi_L, 729);
}

TEST(Solvers, MatchRayOracle) {
  for (const auto& m : {kAsym1, kAsym3, kAsym6}) {
    const auto mm = minmax_disagreement(m);
    const auto ne = nash_disagreement(m);
    const auto ks = oracle::ks(m, {mm.d_L, mm.d_H}, 1e-4);
    const auto erg = oracle::erg(m, {ne.d_L, ne.d_H}, 1e-4);
    const auto eq = oracle::equal_split(m, 1e-4);
    EXPECT_NEAR(solve_ks(m, mm).pi_L, ks.pi_L, 1e-4);
    EXPECT_NEAR(solve_erg(m, ne).pi_L, erg.pi_L, 1e-4);
    EXPECT_NEAR(solve_equal_split(m).pi_L, eq.pi_L, 1e-4);
  }
}

TEST(Solvers, OnFrontier) {
  for (const auto& set : builtin_param_sets(CostTable::kMain)) {
    if (set.name == "sym") continue;
    const auto& m = set.params;
    const auto mm = minmax_disagreement(m);
    const auto ne = nash_disagreement(m);
    for (const auto& fp : {solve_ks(m, mm), solve_erg(m, mm), solve_equal_split(m),
                           solve_ks(m, ne), solve_erg(m, ne)}) {
      EXPECT_LT(std::abs(frontier_value(m, fp.pi_L, 0).pi_H - fp.pi_H), 1e-6) << set.name;
    }
  }
}

TEST(Solvers, KsEqualisesRelativeProgress) {
  const auto d = minmax_disagreement(kAsym6);
  const auto fp = solve_ks(kAsym6, d);
  const double rel_L = (fp.pi_L - d.d_L) / (monopoly_profit(kAsym6, 0) - d.d_L);
  const double rel_H = (fp.pi_H - d.d_H) / (monopoly_profit(kAsym6, 1) - d.d_H);
  EXPECT_NEAR(rel_L, rel_H, 1e-9);
}

TEST(Solvers, ScaleInvariance) {
  // Scaling a, c and q_max by s scales quantities by s and profits by s^2.
  MarketParams scaled = kAsym3;
  const double s = 2;
  scaled.a *= s;
  scaled.c_L *= s;
  scaled.c_H *= s;
  scaled.q_max *= s;
  const auto base = solve_ks(kAsym3, minmax_disagreement(kAsym3));
  const auto big = solve_ks(scaled, minmax_disagreement(scaled));
  EXPECT_NEAR(big.pi_L, s * s * base.pi_L, 1e-5);
  EXPECT_NEAR(big.pi_H, s * s * base.pi_H, 1e-5);
  EXPECT_NEAR(big.p, s * base.p, 1e-6);
}

TEST(Solvers, ErgIgnoresDisagreementScale) {
  const auto d = nash_disagreement(kAsym3);
  const auto base = solve_erg(kAsym3, d);
  const auto scaled = solve_erg(kAsym3, {d.kind, 0.25 * d.d_L, 0.25 * d.d_H});
  EXPECT_NEAR(scaled.pi_L, base.pi_L, 1e-9);
  EXPECT_NEAR(scaled.pi_H, base.pi_H, 1e-9);
}

TEST(Solvers, ErgNeedsPositiveDisagreement) {
  DisagreementPoint d{DisagreementKind::kNash, 0, 10};
  EXPECT_THROW(solve_erg(kAsym3, d), InvalidArgument);
}

TEST(Suite, OrderAndLabels) {
  const auto suite = benchmark_suite(kAsym3);
  ASSERT_EQ(suite.size(), kAllBenchmarks.size());
  for (std::size_t i = 0; i < suite.size(); ++i) EXPECT_EQ(suite[i].label, kAllBenchmarks[i]);
  for (const auto& b : suite) {
    EXPECT_NEAR(b.outcome.TS, b.outcome.PS + b.outcome.CS, 1e-9);
    EXPECT_NEAR(b.outcome.CS, b.outcome.Q * b.outcome.Q / 2, 1e-6);
  }
}

TEST(Suite, ProfitsBelowMonopoly) {
  for (const auto& set : builtin_param_sets(CostTable::kMain)) {
    const double top = monopoly_profit(set.params, 0);
    for (const auto& b : benchmark_suite(set.params)) {
      EXPECT_LE(b.outcome.PS, top + 1e-6) << set.name << " " << to_string(b.label);
    }
  }
}

TEST(Suite, FailuresCarryTheLabel) {
  MarketParams m = kAsym3;
  m.q_max = 200;  // rival flooding drives min-max profits to zero
  try {
    benchmark_suite(m);
    FAIL() << "expected a solver failure";
  } catch (const SolverFailure& e) {
    EXPECT_EQ(e.label(), "erg");
    EXPECT_EQ(std::string(e.what()).rfind("erg: ", 0), 0u);
  }
}

}  // namespace
}  // namespace cournot

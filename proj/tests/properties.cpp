// Randomised property checks. Runs standalone in a few seconds.
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cournot/analysis.hpp"
#include "cournot/experiment.hpp"
#include "cournot/qlearning.hpp"

namespace cournot {
namespace {

constexpr int kTrials = 2000;

TEST(Property, UpdateMatchesRule) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0, 1), value(-500, 2000);
  for (int i = 0; i < kTrials; ++i) {
    QAgent agent{QMatrix(3, 5), unit(rng), 0.99 * unit(rng)};
    for (double& v : agent.q.data()) v = value(rng);
    const double old = agent.q(1, 2);
    const double reward = value(rng);
    const double next = agent.q.max_value(2);
    const double expect = (1 - agent.alpha) * old + agent.alpha * (reward + agent.delta * next);
    EXPECT_NEAR(agent.update(1, 2, reward, 2), expect, 1e-12 * std::max(1.0, std::abs(expect)));
  }
}

TEST(Property, UpdateDegenerateRates) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> value(-500, 2000);
  for (int i = 0; i < kTrials; ++i) {
    QAgent frozen{QMatrix(2, 4), 0.0, 0.95};
    QAgent full{QMatrix(2, 4), 1.0, 0.95};
    for (double& v : frozen.q.data()) v = value(rng);
    full.q = frozen.q;
    const double r = value(rng);
    const double before = frozen.q(0, 1);
    EXPECT_EQ(frozen.update(0, 1, r, 1), before);
    const double next = full.q.max_value(1);
    EXPECT_NEAR(full.update(0, 1, r, 1), r + 0.95 * next, 1e-12 * std::abs(r + 0.95 * next));
  }
}

TEST(Property, EpsilonDecayLaw) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> beta(1e-8, 1e-3), t(0, 5e5);
  for (int i = 0; i < kTrials; ++i) {
    const double b = beta(rng), t1 = t(rng), t2 = t(rng);
    EXPECT_EQ(epsilon(0, b), 1.0);
    EXPECT_NEAR(epsilon(t1 + t2, b), epsilon(t1, b) * epsilon(t2, b), 1e-12);
    EXPECT_LE(epsilon(t1 + 1, b), epsilon(t1, b));
    EXPECT_NEAR(std::log(epsilon(t1, b)), -b * t1, 1e-9 * std::max(1.0, b * t1));
  }
}

TEST(Property, TieBreakingIsDeterministic) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> level(0, 3);
  for (int i = 0; i < kTrials; ++i) {
    QAgent agent{QMatrix(1, 16), 0.15, 0.95};
    for (double& v : agent.q.data()) v = level(rng);
    const auto row = agent.q.row(0);
    const int first_max =
        static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    EXPECT_EQ(agent.q.greedy(0), first_max);
    Rng a(i), b(i + 1);
    EXPECT_EQ(select_action(agent, 0, 0.0, a), first_max);
    EXPECT_EQ(select_action(agent, 0, 0.0, b), first_max);
  }
}

TEST(Property, SeedReproducibility) {
  LearnerConfig cfg;
  cfg.beta = 5e-4;
  EpisodeLimits lim;
  lim.convergence_window = 500;
  lim.max_periods = 500'000;
  lim.post_rounds = 20;
  MarketParams m;
  m.c_L = 10;
  m.c_H = 28;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 99ULL, 123456789ULL}) {
    for (int k : {0, 1}) {
      cfg.k = k;
      EXPECT_TRUE(run_episode(m, cfg, seed, lim) == run_episode(m, cfg, seed, lim));
    }
  }

  ExperimentSpec spec;
  spec.param_sets = builtin_param_sets(CostTable::kMain);
  spec.technology.nu.reset();
  spec.technology.beta = 5e-4;
  spec.runs = 2;
  spec.convergence_window = 500;
  spec.max_periods = 500'000;
  spec.post_rounds = 20;
  RunOptions one, two;
  one.threads = 1;
  two.threads = 2;
  const auto x = run_experiment(spec, one);
  const auto y = run_experiment(spec, two);
  for (std::size_t i = 0; i < x.sets.size(); ++i) {
    for (std::size_t r = 0; r < x.sets[i].records.size(); ++r) {
      EXPECT_TRUE(x.sets[i].records[r].episode == y.sets[i].records[r].episode);
    }
  }
}

TEST(Property, AggregationLinearity) {
  std::mt19937_64 rng(5);
  const auto grid = default_grid();
  std::uniform_int_distribution<int> action(0, 15);
  std::bernoulli_distribution converged(0.9);
  for (const auto& set : builtin_param_sets(CostTable::kMain)) {
    std::vector<RunRecord> records(200);
    for (auto& r : records) {
      r.episode.converged = converged(rng);
      if (!r.episode.converged) continue;
      Outcome sum;
      for (int t = 0; t < 3; ++t) {
        const auto o = outcome_from_quantities(set.params, grid[action(rng)], grid[action(rng)]);
        sum.q_L += o.q_L / 3;
        sum.q_H += o.q_H / 3;
        sum.Q += o.Q / 3;
        sum.pi_L += o.pi_L / 3;
        sum.pi_H += o.pi_H / 3;
        sum.PS += o.PS / 3;
        sum.CS += o.CS / 3;
        sum.TS += o.TS / 3;
      }
      r.episode.post_play = sum;
    }
    const auto s = summarize(set, records);
    const double scale = std::max({1.0, std::abs(s.mean.TS), std::abs(s.mean.PS)});
    EXPECT_NEAR(s.mean.PS, s.mean.pi_L + s.mean.pi_H, 1e-12 * scale);
    EXPECT_NEAR(s.mean.TS, s.mean.PS + s.mean.CS, 1e-12 * scale);
    EXPECT_NEAR(s.mean.Q, s.mean.q_L + s.mean.q_H, 1e-12 * std::max(1.0, s.mean.Q));
  }
}

TEST(Property, DistanceZeroAndInvariance) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> value(1, 100), scale(0.1, 10);
  for (int i = 0; i < kTrials / 10; ++i) {
    std::vector<double> sim(7), bench(7);
    for (auto& v : sim) v = value(rng);
    for (auto& v : bench) v = value(rng);
    EXPECT_EQ(average_squared_distance(sim, sim), 0);
    EXPECT_EQ(average_squared_normalized_distance(bench, bench, 0), 0);
    const double d = average_squared_distance(sim, bench);
    EXPECT_GE(d, 0);
    EXPECT_DOUBLE_EQ(d, average_squared_distance(bench, sim));

    std::vector<std::size_t> order(7);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> ps(7), pb(7);
    std::size_t sym_at = 0;
    for (std::size_t j = 0; j < 7; ++j) {
      ps[j] = sim[order[j]];
      pb[j] = bench[order[j]];
      if (order[j] == 0) sym_at = j;
    }
    EXPECT_NEAR(average_squared_distance(ps, pb), d, 1e-9 * d);
    const double n = average_squared_normalized_distance(sim, bench, 0);
    EXPECT_NEAR(average_squared_normalized_distance(ps, pb, sym_at), n, 1e-12 * std::max(1.0, n));

    const double ks = scale(rng), kb = scale(rng);
    std::vector<double> ss(sim), sb(bench);
    for (auto& v : ss) v *= ks;
    for (auto& v : sb) v *= kb;
    EXPECT_NEAR(average_squared_normalized_distance(ss, sb, 0), n, 1e-12 * std::max(1.0, n));
  }
}

}  // namespace
}  // namespace cournot

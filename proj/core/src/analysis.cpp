#include "cournot/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cournot/error.hpp"

namespace cournot {

std::string_view to_string(OutcomeVar var) {
  switch (var) {
    case OutcomeVar::kQ: return "Q";
    case OutcomeVar::kCS: return "CS";
    case OutcomeVar::kPS: return "PS";
    case OutcomeVar::kTS: return "TS";
  }
  return "?";
}

double value_of(const Outcome& outcome, OutcomeVar var) {
  switch (var) {
    case OutcomeVar::kQ: return outcome.Q;
    case OutcomeVar::kCS: return outcome.CS;
    case OutcomeVar::kPS: return outcome.PS;
    case OutcomeVar::kTS: return outcome.TS;
  }
  return std::nan("");
}

double average_squared_distance(std::span<const double> sim, std::span<const double> bench) {
  if (sim.size() != bench.size() || sim.empty()) {
    throw InvalidArgument("series must be non-empty and of equal length");
  }
  double sum = 0;
  for (std::size_t i = 0; i < sim.size(); ++i) sum += (sim[i] - bench[i]) * (sim[i] - bench[i]);
  return sum / static_cast<double>(sim.size());
}

double average_squared_normalized_distance(std::span<const double> sim,
                                           std::span<const double> bench,
                                           std::size_t sym_index) {
  if (sim.size() != bench.size() || sim.empty()) {
    throw InvalidArgument("series must be non-empty and of equal length");
  }
  if (sym_index >= sim.size()) throw InvalidArgument("symmetric reference index out of range");
  const double sim_ref = sim[sym_index];
  const double bench_ref = bench[sym_index];
  if (sim_ref == 0 || bench_ref == 0) {
    throw InvalidArgument("cannot normalise by a zero symmetric-case value");
  }
  double sum = 0;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    const double d = sim[i] / sim_ref - bench[i] / bench_ref;
    sum += d * d;
  }
  return sum / static_cast<double>(sim.size());
}

const FitRow& FitTable::at(BenchmarkLabel label) const {
  for (const auto& row : rows) {
    if (row.label == label) return row;
  }
  throw InvalidArgument(fmt::format("fit table has no row '{}'", to_string(label)));
}

double FitTable::distance(BenchmarkLabel label, OutcomeVar var) const {
  return at(label).distance[static_cast<int>(var)];
}

double FitTable::normalized(BenchmarkLabel label, OutcomeVar var) const {
  return at(label).normalized[static_cast<int>(var)];
}

namespace {

const Outcome& find_benchmark(const std::vector<BenchmarkPoint>& suite, BenchmarkLabel label) {
  for (const auto& b : suite) {
    if (b.label == label) return b.outcome;
  }
  throw InvalidArgument(fmt::format("benchmark suite lacks '{}'", to_string(label)));
}

}  // namespace

FitTable fit_distances(std::span<const Outcome> sim,
                       const std::vector<std::vector<BenchmarkPoint>>& benches,
                       std::size_t sym_index) {
  if (sim.size() != benches.size()) {
    throw InvalidArgument("simulation and benchmark series cover different sets");
  }
  FitTable table;
  std::vector<double> s(sim.size());
  std::vector<double> b(sim.size());
  for (auto label : kAllBenchmarks) {
    FitRow row{label, {}, {}};
    for (auto var : kFitVars) {
      for (std::size_t i = 0; i < sim.size(); ++i) {
        s[i] = value_of(sim[i], var);
        b[i] = value_of(find_benchmark(benches[i], label), var);
      }
      const int v = static_cast<int>(var);
      row.distance[v] = average_squared_distance(s, b);
      row.normalized[v] = 1000.0 * average_squared_normalized_distance(s, b, sym_index);
    }
    table.rows.push_back(row);
  }
  return table;
}

FitTable fit_distances(const ExperimentSummary& sim,
                       const std::vector<std::vector<BenchmarkPoint>>& benches) {
  std::vector<Outcome> means;
  std::optional<std::size_t> sym;
  for (std::size_t i = 0; i < sim.sets.size(); ++i) {
    if (!sim.sets[i].valid()) {
      throw InvalidArgument(fmt::format("set '{}' has no converged runs", sim.sets[i].name));
    }
    means.push_back(sim.sets[i].mean);
    if (sim.sets[i].name == "sym") sym = i;
  }
  if (!sym) throw InvalidArgument("no 'sym' set to normalise against");
  return fit_distances(means, benches, *sym);
}

// ---------------------------------------------------------------------------

std::string_view to_string(DeviationMethod method) {
  return method == DeviationMethod::kBestResponse ? "best_response" : "qvalue";
}

std::optional<DeviationMethod> parse_deviation_method(std::string_view text) {
  if (text == "best_response") return DeviationMethod::kBestResponse;
  if (text == "qvalue") return DeviationMethod::kQValue;
  return std::nullopt;
}

std::string_view to_string(DeviationClass cls) {
  switch (cls) {
    case DeviationClass::kNeither: return "neither";
    case DeviationClass::kOnlyL: return "only_L";
    case DeviationClass::kOnlyH: return "only_H";
    case DeviationClass::kBoth: return "both";
  }
  return "?";
}

int static_best_response(const MarketParams& params, std::span<const double> grid, int firm,
                         double rival_quantity) {
  if (grid.empty()) throw InvalidArgument("empty action grid");
  const double cost = params.cost(firm);
  int best = 0;
  double best_profit = -INFINITY;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double pi = profit(params, cost, grid[a], grid[a] + rival_quantity);
    if (pi > best_profit) {
      best_profit = pi;
      best = static_cast<int>(a);
    }
  }
  return best;
}

namespace {

struct PathPayoff {
  std::array<double, 2> discounted{};
};

// Plays `first` at t = 0 from `anchor`, then greedy for `horizon` periods.
PathPayoff play_path(const MarketParams& params, const LearnerConfig& cfg,
                     const std::array<QMatrix, 2>& q, const StateCodec& codec, JointAction first,
                     int horizon, double delta) {
  PathPayoff out;
  JointAction act = first;
  double weight = 1.0;
  for (int t = 0; t <= horizon; ++t) {
    const Outcome o = outcome_unchecked(params, cfg.grid[act.L], cfg.grid[act.H]);
    out.discounted[0] += weight * o.pi_L;
    out.discounted[1] += weight * o.pi_H;
    weight *= delta;
    const std::size_t s = codec.encode(act.L, act.H);
    act = {q[0].greedy(s), q[1].greedy(s)};
  }
  return out;
}

DeviationClass classify(bool l, bool h) {
  if (l && h) return DeviationClass::kBoth;
  if (l) return DeviationClass::kOnlyL;
  if (h) return DeviationClass::kOnlyH;
  return DeviationClass::kNeither;
}

DeviationVerdict run_deviation(DeviationMethod method, const RunRecord& run,
                               const MarketParams& params, const LearnerConfig& cfg,
                               const DeviationOptions& options) {
  const auto& ep = run.episode;
  if (!ep.converged) {
    throw Unavailable(fmt::format("run {}/{} did not converge", run.set, run.run));
  }
  if (ep.final_q[0].empty() || ep.final_q[1].empty()) {
    throw Unavailable(fmt::format("run {}/{} has no Q-matrices", run.set, run.run));
  }
  if (options.horizon < 0) throw InvalidArgument("deviation horizon must be non-negative");
  const StateCodec codec(cfg.m(), cfg.k);
  for (const auto& q : ep.final_q) {
    if (q.states() != codec.num_states() || q.actions() != static_cast<std::size_t>(cfg.m())) {
      throw InvalidArgument("Q-matrix shape does not match the learner configuration");
    }
  }
  const double delta = options.delta.value_or(cfg.delta);
  const std::size_t anchor = ep.cycle_anchor;
  if (anchor >= codec.num_states()) throw InvalidArgument("cycle anchor out of range");

  const JointAction prescribed{ep.final_q[0].greedy(anchor), ep.final_q[1].greedy(anchor)};
  const auto baseline = play_path(params, cfg, ep.final_q, codec, prescribed, options.horizon, delta);

  DeviationVerdict verdict;
  for (int i = 0; i < 2; ++i) {
    const int own = i == 0 ? prescribed.L : prescribed.H;
    const int rival = i == 0 ? prescribed.H : prescribed.L;
    int deviation = own;
    if (method == DeviationMethod::kBestResponse) {
      deviation = static_best_response(params, cfg.grid, i, cfg.grid[rival]);
    } else {
      const auto row = ep.final_q[i].row(anchor);
      for (int a = own + 1; a < cfg.m(); ++a) {
        if (deviation == own || row[a] > row[deviation]) deviation = a;
      }
    }

    auto& agent = verdict.agents[i];
    agent.prescribed_action = own;
    agent.deviation_action = deviation;
    agent.baseline_payoff = baseline.discounted[i];
    if (deviation == own) {
      agent.deviation_payoff = baseline.discounted[i];
    } else {
      JointAction first = prescribed;
      (i == 0 ? first.L : first.H) = deviation;
      agent.deviation_payoff =
          play_path(params, cfg, ep.final_q, codec, first, options.horizon, delta).discounted[i];
    }
    agent.profitable = agent.deviation_payoff > agent.baseline_payoff;
  }
  verdict.classification = classify(verdict.agents[0].profitable, verdict.agents[1].profitable);
  return verdict;
}

}  // namespace

DeviationVerdict deviation_best_response(const RunRecord& run, const MarketParams& params,
                                         const LearnerConfig& cfg,
                                         const DeviationOptions& options) {
  return run_deviation(DeviationMethod::kBestResponse, run, params, cfg, options);
}

DeviationVerdict deviation_qvalue(const RunRecord& run, const MarketParams& params,
                                  const LearnerConfig& cfg, const DeviationOptions& options) {
  return run_deviation(DeviationMethod::kQValue, run, params, cfg, options);
}

DeviationVerdict deviation_test(DeviationMethod method, const RunRecord& run,
                                const MarketParams& params, const LearnerConfig& cfg,
                                const DeviationOptions& options) {
  return run_deviation(method, run, params, cfg, options);
}

ClassShares classification_shares(std::span<const DeviationVerdict> verdicts) {
  ClassShares shares;
  shares.runs = static_cast<int>(verdicts.size());
  if (verdicts.empty()) return shares;
  for (const auto& v : verdicts) shares.share[static_cast<int>(v.classification)] += 1.0;
  for (double& s : shares.share) s /= static_cast<double>(verdicts.size());
  return shares;
}

SubsampleSplit subsample_split(std::span<const RunRecord* const> runs,
                               std::span<const DeviationVerdict> verdicts) {
  if (runs.size() != verdicts.size()) throw InvalidArgument("one verdict per run required");
  SubsampleSplit split;
  double sum_compatible = 0;
  double sum_deviating = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& play = runs[i]->episode.post_play;
    if (!play) throw InvalidArgument("subsample split needs converged runs");
    if (verdicts[i].classification == DeviationClass::kNeither) {
      sum_compatible += play->Q;
      ++split.n_compatible;
    } else {
      sum_deviating += play->Q;
      ++split.n_deviating;
    }
  }
  if (split.n_compatible > 0) split.mean_Q_compatible = sum_compatible / split.n_compatible;
  if (split.n_deviating > 0) split.mean_Q_deviating = sum_deviating / split.n_deviating;
  return split;
}

std::vector<SetDeviations> deviation_tests(const ExperimentSummary& summary,
                                           DeviationMethod method,
                                           const DeviationOptions& options) {
  const LearnerConfig cfg = summary.spec.learner_config();
  std::vector<SetDeviations> out;
  for (const auto& set : summary.sets) {
    SetDeviations dev;
    dev.set = set.name;
    for (const auto& r : set.records) {
      if (!r.episode.converged) continue;
      dev.runs.push_back(&r);
      dev.verdicts.push_back(deviation_test(method, r, set.params, cfg, options));
    }
    out.push_back(std::move(dev));
  }
  return out;
}

}  // namespace cournot

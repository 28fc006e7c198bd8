#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cournot/experiment.hpp"
#include "cournot/market.hpp"

namespace cournot {

// ---------------------------------------------------------------------------
// Goodness of fit
// ---------------------------------------------------------------------------

/// Outcome variables compared against the benchmarks (PS and TS appear as
/// total profits and welfare in the tables).
enum class OutcomeVar { kQ, kCS, kPS, kTS };
inline constexpr std::array<OutcomeVar, 4> kFitVars = {OutcomeVar::kQ, OutcomeVar::kCS,
                                                       OutcomeVar::kPS, OutcomeVar::kTS};

std::string_view to_string(OutcomeVar var);
double value_of(const Outcome& outcome, OutcomeVar var);

/// (1/|S|) sum_s (sim_s - bench_s)^2.
double average_squared_distance(std::span<const double> sim, std::span<const double> bench);

/// Same distance after dividing each series by its own entry at `sym_index`.
/// Throws InvalidArgument when either reference value is zero. Not scaled.
double average_squared_normalized_distance(std::span<const double> sim,
                                           std::span<const double> bench,
                                           std::size_t sym_index);

struct FitRow {
  BenchmarkLabel label;
  std::array<double, 4> distance{};    // indexed like kFitVars
  std::array<double, 4> normalized{};  // multiplied by 1000
};

struct FitTable {
  std::vector<FitRow> rows;

  const FitRow& at(BenchmarkLabel label) const;
  double distance(BenchmarkLabel label, OutcomeVar var) const;
  double normalized(BenchmarkLabel label, OutcomeVar var) const;
};

/// Distances between the simulated means of every set and each benchmark.
/// `benches[i]` is the benchmark suite of `sim.sets[i]`; the set named
/// "sym" is the normalisation reference.
FitTable fit_distances(const ExperimentSummary& sim,
                       const std::vector<std::vector<BenchmarkPoint>>& benches);

/// Same on raw series: sim[i] and benches[i] belong to the same set.
FitTable fit_distances(std::span<const Outcome> sim,
                       const std::vector<std::vector<BenchmarkPoint>>& benches,
                       std::size_t sym_index);

// ---------------------------------------------------------------------------
// One-shot deviation tests
// ---------------------------------------------------------------------------

enum class DeviationMethod { kBestResponse, kQValue };
std::string_view to_string(DeviationMethod method);
std::optional<DeviationMethod> parse_deviation_method(std::string_view text);

struct AgentDeviation {
  int prescribed_action = 0;  // greedy action at the anchor state
  int deviation_action = 0;
  double deviation_payoff = 0;  // discounted, t = 0 is the deviation period
  double baseline_payoff = 0;
  bool profitable = false;      // deviation_payoff > baseline_payoff
};

enum class DeviationClass { kNeither, kOnlyL, kOnlyH, kBoth };
std::string_view to_string(DeviationClass cls);

struct DeviationVerdict {
  std::array<AgentDeviation, 2> agents;
  DeviationClass classification = DeviationClass::kNeither;
};

struct DeviationOptions {
  /// Periods simulated after the deviation period.
  int horizon = 40;
  /// Discount factor; the learners' delta when unset.
  std::optional<double> delta;
};

/// Grid action maximising the one-period profit of firm `firm` against a
/// rival playing `rival_quantity`; lowest index on ties.
int static_best_response(const MarketParams& params, std::span<const double> grid, int firm,
                         double rival_quantity);

/// Each agent in turn plays its static grid best response to the rival's
/// prescribed action at the anchor state of the converged cycle, then both
/// follow their greedy policies. Compared with undisturbed greedy play over
/// the same horizon. Throws Unavailable for non-converged runs or runs
/// without Q-matrices.
DeviationVerdict deviation_best_response(const RunRecord& run, const MarketParams& params,
                                         const LearnerConfig& cfg,
                                         const DeviationOptions& options = {});

/// As deviation_best_response, but the deviation is the action with the
/// highest Q-value among those strictly above the agent's prescribed action.
/// No candidate means a null, unprofitable deviation.
DeviationVerdict deviation_qvalue(const RunRecord& run, const MarketParams& params,
                                  const LearnerConfig& cfg, const DeviationOptions& options = {});

DeviationVerdict deviation_test(DeviationMethod method, const RunRecord& run,
                                const MarketParams& params, const LearnerConfig& cfg,
                                const DeviationOptions& options = {});

struct ClassShares {
  int runs = 0;
  std::array<double, 4> share{};  // indexed by DeviationClass

  double operator[](DeviationClass cls) const { return share[static_cast<int>(cls)]; }
};

ClassShares classification_shares(std::span<const DeviationVerdict> verdicts);

struct SubsampleSplit {
  /// Runs in which neither agent deviates profitably.
  std::optional<double> mean_Q_compatible;
  /// Runs in which at least one agent deviates profitably.
  std::optional<double> mean_Q_deviating;
  int n_compatible = 0;
  int n_deviating = 0;
};

/// Mean post-convergence Q of the incentive-compatible and deviating runs.
/// verdicts[i] belongs to runs[i].
SubsampleSplit subsample_split(std::span<const RunRecord* const> runs,
                               std::span<const DeviationVerdict> verdicts);

/// Verdicts for every converged run of a set, in run order, plus the records
/// they belong to.
struct SetDeviations {
  std::string set;
  std::vector<const RunRecord*> runs;
  std::vector<DeviationVerdict> verdicts;
};

std::vector<SetDeviations> deviation_tests(const ExperimentSummary& summary,
                                           DeviationMethod method,
                                           const DeviationOptions& options = {});

}  // namespace cournot

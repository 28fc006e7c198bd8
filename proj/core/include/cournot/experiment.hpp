#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cournot/market.hpp"
#include "cournot/qlearning.hpp"

namespace cournot {

/// Which cost table to draw the seven parameterizations from.
enum class CostTable {
  kMain,  // c_L = 19 - 3j, c_H = 19 + 3j
  kAlt,   // c_L = 19,      c_H = 19 + 3j
};

std::string_view to_string(CostTable table);
std::optional<CostTable> parse_cost_table(std::string_view text);

struct ParamSet {
  std::string name;  // sym, asym1, ..., asym6
  MarketParams params;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

/// The seven parameterizations sym, asym1..asym6 of the chosen table
/// (a = 91, b = 1, q_max = 45).
std::vector<ParamSet> builtin_param_sets(CostTable table);

/// Learning technology of an experiment. Exactly one of nu / beta is set.
struct Technology {
  double alpha = 0.15;
  std::optional<double> nu = 21.0;
  std::optional<double> beta;
  double delta = 0.95;
  int k = 1;

  friend bool operator==(const Technology&, const Technology&) = default;
};

struct ExperimentSpec {
  std::vector<ParamSet> param_sets;
  Technology technology;
  int runs = 100;
  std::uint64_t master_seed = 42;
  int post_rounds = 1000;
  std::int64_t convergence_window = 100'000;
  std::int64_t max_periods = 50'000'000;
  std::vector<double> grid = default_grid();
  double q_init_low = 0.0;
  double q_init_high = 1e-7;

  void validate() const;
  /// Decay rate, derived from nu when nu is the supplied intensity.
  double resolved_beta() const;
  LearnerConfig learner_config() const;
  EpisodeLimits limits() const;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct RunRecord {
  std::string set;
  int run = 0;
  std::uint64_t seed = 0;
  EpisodeResult episode;
};

struct SetSummary {
  std::string name;
  MarketParams params;
  int runs = 0;
  int converged = 0;
  /// Mean and sample standard deviation over converged runs (NaN when none).
  Outcome mean;
  Outcome sd;
  double mean_periods = 0;
  /// Ordered by run index.
  std::vector<RunRecord> records;

  bool valid() const { return converged > 0; }
};

struct ExperimentSummary {
  ExperimentSpec spec;
  std::vector<SetSummary> sets;

  const SetSummary* find(std::string_view name) const;
};

/// Per-run seed: a stable 64-bit hash of (master seed, set name, run index).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view set, int run);

/// Reduces run records (ordered by run index) to a summary row.
SetSummary summarize(const ParamSet& set, std::vector<RunRecord> records);

struct RunOptions {
  /// Worker threads; 0 picks default_thread_count().
  int threads = 0;
  /// Drop final Q-matrices from the records to save memory.
  bool keep_q = true;
  /// Called after each finished run with (done, total). May be invoked from
  /// worker threads, never concurrently.
  std::function<void(int, int)> progress;
};

/// COURNOT_LAB_THREADS if set, otherwise the hardware concurrency.
int default_thread_count();

/// Runs `spec.runs` episodes for every parameter set on a bounded worker
/// pool. Results do not depend on the number of threads.
ExperimentSummary run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

}  // namespace cournot

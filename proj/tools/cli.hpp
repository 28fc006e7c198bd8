#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cournot::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kBadInput = 3,
  kSolverFailure = 4,
  kNotConverged = 5,
};

struct BenchmarksOptions {
  std::string set = "main";
  std::optional<std::filesystem::path> out;  // stdout when unset
  bool state_wise_lottery_cs = false;
  bool grid_minmax = false;
};

struct FrontierOptions {
  std::string set = "main";
  std::string spec_name;
  int samples = 101;
  std::optional<std::filesystem::path> out;
};

struct SimulateOptions {
  std::string set = "main";
  std::vector<std::string> only;  // subset of set names, all when empty
  int k = 1;
  double alpha = 0.15;
  std::optional<double> nu;
  std::optional<double> beta;
  double delta = 0.95;
  int runs = 100;
  unsigned long long seed = 42;
  int post_rounds = 1000;
  long long window = 100'000;
  long long max_periods = 50'000'000;
  bool write_q = true;
  int threads = 0;
  bool quiet = false;
  std::filesystem::path out;
};

struct AnalyzeOptions {
  std::filesystem::path sim;
  std::filesystem::path out = "fit.csv";
};

struct DeviateOptions {
  std::filesystem::path sim;
  std::string method = "best_response";
  std::filesystem::path out = "dev.csv";
  int horizon = 40;
};

struct FiguresOptions {
  std::filesystem::path sim;
  std::filesystem::path out;
  int frontier_samples = 101;
};

// Each command returns an ExitCode and reports problems on `err`.
int cmd_benchmarks(const BenchmarksOptions& opts, std::ostream& out, std::ostream& err);
int cmd_frontier(const FrontierOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_deviate(const DeviateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_figures(const FiguresOptions& opts, std::ostream& out, std::ostream& err);

/// Normalised-distance companion of an analyze output: fit.csv -> fit_normalized.csv.
std::filesystem::path normalized_path(const std::filesystem::path& fit);
/// Cost-table echo written next to a benchmarks output: b.csv -> b_costs.csv.
std::filesystem::path costs_path(const std::filesystem::path& benchmarks);

/// Parses the command line (and an optional --config file) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cournot::cli

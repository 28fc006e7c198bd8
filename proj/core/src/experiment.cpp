#include "cournot/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "cournot/error.hpp"

namespace cournot {

std::string_view to_string(CostTable table) {
  return table == CostTable::kMain ? "main" : "alt";
}

std::optional<CostTable> parse_cost_table(std::string_view text) {
  if (text == "main") return CostTable::kMain;
  if (text == "alt") return CostTable::kAlt;
  return std::nullopt;
}

std::vector<ParamSet> builtin_param_sets(CostTable table) {
  std::vector<ParamSet> sets;
  for (int j = 0; j <= 6; ++j) {
    MarketParams params;
    params.a = 91;
    params.b = 1;
    params.q_max = 45;
    params.c_L = table == CostTable::kMain ? 19.0 - 3 * j : 19.0;
    params.c_H = 19.0 + 3 * j;
    sets.push_back({j == 0 ? std::string("sym") : fmt::format("asym{}", j), params});
  }
  return sets;
}

void ExperimentSpec::validate() const {
  if (param_sets.empty()) throw InvalidArgument("experiment has no parameter sets");
  for (const auto& set : param_sets) set.params.validate();
  if (runs < 1) throw InvalidArgument("runs must be at least 1");
  if (technology.nu.has_value() == technology.beta.has_value()) {
    throw InvalidArgument("exactly one of nu and beta must be given");
  }
  learner_config().validate();
  if (post_rounds < 1) throw InvalidArgument("post_rounds must be positive");
  if (convergence_window < 1) throw InvalidArgument("convergence window must be positive");
  if (max_periods < convergence_window) {
    throw InvalidArgument("max_periods must be at least the convergence window");
  }
}

double ExperimentSpec::resolved_beta() const {
  if (technology.beta) return *technology.beta;
  if (!technology.nu) throw InvalidArgument("neither nu nor beta given");
  return beta_from_nu(*technology.nu, static_cast<int>(grid.size()), LearnerConfig::kAgents,
                      technology.k);
}

LearnerConfig ExperimentSpec::learner_config() const {
  LearnerConfig cfg;
  cfg.alpha = technology.alpha;
  cfg.beta = resolved_beta();
  cfg.delta = technology.delta;
  cfg.k = technology.k;
  cfg.grid = grid;
  cfg.q_init_low = q_init_low;
  cfg.q_init_high = q_init_high;
  return cfg;
}

EpisodeLimits ExperimentSpec::limits() const {
  return {max_periods, convergence_window, post_rounds};
}

const SetSummary* ExperimentSummary::find(std::string_view name) const {
  for (const auto& set : sets) {
    if (set.name == name) return &set;
  }
  return nullptr;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view set, int run) {
  // FNV-1a over a fixed little-endian byte layout, then a splitmix64 finaliser.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_byte = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(master_seed >> (8 * i)));
  for (char c : set) mix_byte(static_cast<unsigned char>(c));
  mix_byte(0);
  const auto r = static_cast<std::uint64_t>(static_cast<std::uint32_t>(run));
  for (int i = 0; i < 4; ++i) mix_byte(static_cast<unsigned char>(r >> (8 * i)));

  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

namespace {

constexpr std::array<double Outcome::*, 9> kFields = {
    &Outcome::q_L, &Outcome::q_H, &Outcome::Q,  &Outcome::p,  &Outcome::pi_L,
    &Outcome::pi_H, &Outcome::PS, &Outcome::CS, &Outcome::TS,
};

}  // namespace

SetSummary summarize(const ParamSet& set, std::vector<RunRecord> records) {
  SetSummary out;
  out.name = set.name;
  out.params = set.params;
  out.runs = static_cast<int>(records.size());

  double periods = 0;
  for (const auto& r : records) {
    periods += static_cast<double>(r.episode.periods);
    if (r.episode.converged) ++out.converged;
  }
  out.mean_periods = records.empty() ? 0.0 : periods / static_cast<double>(records.size());

  const double nan = std::nan("");
  for (auto field : kFields) {
    if (out.converged == 0) {
      out.mean.*field = nan;
      out.sd.*field = nan;
      continue;
    }
    double sum = 0;
    for (const auto& r : records) {
      if (r.episode.converged) sum += (*r.episode.post_play).*field;
    }
    const double mean = sum / out.converged;
    double ss = 0;
    for (const auto& r : records) {
      if (r.episode.converged) {
        const double d = (*r.episode.post_play).*field - mean;
        ss += d * d;
      }
    }
    out.mean.*field = mean;
    out.sd.*field = out.converged > 1 ? std::sqrt(ss / (out.converged - 1)) : 0.0;
  }
  out.records = std::move(records);
  return out;
}

int default_thread_count() {
  if (const char* env = std::getenv("COURNOT_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ExperimentSummary run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  const LearnerConfig cfg = spec.learner_config();
  const EpisodeLimits limits = spec.limits();

  const int per_set = spec.runs;
  const int total = static_cast<int>(spec.param_sets.size()) * per_set;
  std::vector<RunRecord> records(total);

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int job = next++; job < total; job = next++) {
      const auto& set = spec.param_sets[job / per_set];
      const int run = job % per_set;
      try {
        RunRecord rec;
        rec.set = set.name;
        rec.run = run;
        rec.seed = derive_seed(spec.master_seed, set.name, run);
        rec.episode = run_episode(set.params, cfg, rec.seed, limits);
        if (!options.keep_q) rec.episode.final_q = {};
        records[job] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
      const int finished = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(finished, total);
      }
    }
  };

  const int threads = std::max(1, std::min(options.threads > 0 ? options.threads
                                                                : default_thread_count(),
                                           total));
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentSummary summary;
  summary.spec = spec;
  for (std::size_t i = 0; i < spec.param_sets.size(); ++i) {
    std::vector<RunRecord> set_records(std::make_move_iterator(records.begin() + i * per_set),
                                       std::make_move_iterator(records.begin() + (i + 1) * per_set));
    summary.sets.push_back(summarize(spec.param_sets[i], std::move(set_records)));
  }
  return summary;
}

}  // namespace cournot

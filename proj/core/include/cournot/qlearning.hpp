#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cournot/market.hpp"

namespace cournot {

using Rng = std::mt19937_64;

/// Quantities {0, 3, ..., 45}.
std::vector<double> default_grid();

/// Learning technology shared by both agents.
struct LearnerConfig {
  static constexpr int kAgents = 2;

  double alpha = 0.15;  // learning rate
  double beta = 3.41e-6;  // exploration decay, epsilon_t = exp(-beta t)
  double delta = 0.95;  // discount factor
  int k = 1;            // memory length in periods (0 or 1)
  std::vector<double> grid = default_grid();
  double q_init_low = 0.0;
  double q_init_high = 1e-7;

  int m() const { return static_cast<int>(grid.size()); }

  /// Throws InvalidArgument on out-of-range hyperparameters or a grid that
  /// is not strictly increasing.
  void validate() const;

  friend bool operator==(const LearnerConfig&, const LearnerConfig&) = default;
};

/// Maps the last k joint actions onto a state index. With k = 0 there is a
/// single state; with k = 1 the state is a_L * m + a_H.
class StateCodec {
 public:
  StateCodec(int m, int k);

  std::size_t num_states() const { return num_states_; }
  int m() const { return m_; }
  int k() const { return k_; }

  std::size_t encode(int action_L, int action_H) const {
    return k_ == 0 ? 0 : static_cast<std::size_t>(action_L) * m_ + action_H;
  }
  /// Inverse of encode for k = 1; {0, 0} for the single k = 0 state.
  std::array<int, 2> decode(std::size_t state) const;

 private:
  int m_;
  int k_;
  std::size_t num_states_;
};

/// Dense |S| x |A| action-value table, row-major.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t states, std::size_t actions, double fill = 0.0)
      : states_(states), actions_(actions), values_(states * actions, fill) {}

  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t s, std::size_t a) { return values_[s * actions_ + a]; }
  double operator()(std::size_t s, std::size_t a) const { return values_[s * actions_ + a]; }

  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * actions_, actions_};
  }
  std::span<const double> data() const { return values_; }
  std::span<double> data() { return values_; }

  /// Argmax of row s, ties broken towards the lowest action index.
  int greedy(std::size_t s) const;
  double max_value(std::size_t s) const { return (*this)(s, greedy(s)); }

  friend bool operator==(const QMatrix&, const QMatrix&) = default;

 private:
  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<double> values_;
};

/// One learner: its Q-matrix plus the update hyperparameters.
struct QAgent {
  QMatrix q;
  double alpha = 0.15;
  double delta = 0.95;

  /// Q(s,a) <- (1 - alpha) Q(s,a) + alpha (reward + delta max_a' Q(s_next, a')).
  /// Only the (s, a) cell changes. Returns the new value.
  double update(std::size_t s, int a, double reward, std::size_t s_next);
};

/// Exploration probability exp(-beta t).
double epsilon(double t, double beta);

/// Epsilon-greedy choice: with probability epsilon a uniform draw over all
/// actions (the greedy one included), otherwise the lowest-index argmax.
int select_action(const QAgent& agent, std::size_t state, double eps, Rng& rng);
int select_action(const QAgent& agent, std::size_t state, std::int64_t t, double beta,
                  Rng& rng);

/// Decay rate that gives `nu` expected random visits per Q-matrix cell,
///   nu = (m-1)^n / (m^(kn+n+1) (1 - exp(-beta (n+1)))).
/// Throws Infeasible when no beta in (0, inf) achieves nu.
double beta_from_nu(double nu, int m, int n, int k);
double nu_from_beta(double beta, int m, int n, int k);

struct EpisodeLimits {
  std::int64_t max_periods = 50'000'000;
  std::int64_t convergence_window = 100'000;
  int post_rounds = 1000;
};

struct JointAction {
  int L = 0;
  int H = 0;
  friend bool operator==(const JointAction&, const JointAction&) = default;
};

struct EpisodeResult {
  bool converged = false;
  /// Periods simulated until convergence was declared (or the cap).
  std::int64_t periods = 0;
  std::array<QMatrix, 2> final_q;
  /// Mean outcome over the greedy post-convergence rounds.
  std::optional<Outcome> post_play;
  /// Joint actions of the greedy cycle reached after convergence.
  std::vector<JointAction> post_cycle;
  /// State in which the recorded cycle starts.
  std::size_t cycle_anchor = 0;
  /// State at the moment convergence was declared.
  std::size_t end_state = 0;

  friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

/// Optional overrides for testing: replace the random Q initialisation and
/// starting state.
struct EpisodeInit {
  std::optional<std::array<QMatrix, 2>> q;
  std::optional<std::size_t> state;
};

/// Synchronous repeated play between two Q-learners until neither agent's
/// per-state greedy action has changed for `convergence_window` periods,
/// followed by `post_rounds` greedy rounds without learning.
EpisodeResult run_episode(const MarketParams& params, const LearnerConfig& cfg,
                          std::uint64_t seed, const EpisodeLimits& limits = {},
                          const EpisodeInit& init = {});

/// Follows the greedy policies from `start` and returns the cycle eventually
/// reached, with the state it starts in.
std::pair<std::vector<JointAction>, std::size_t> greedy_cycle(const QMatrix& q_L,
                                                              const QMatrix& q_H,
                                                              const StateCodec& codec,
                                                              std::size_t start);

}  // namespace cournot

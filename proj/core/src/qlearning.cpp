#include "cournot/qlearning.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cournot/error.hpp"

namespace cournot {

namespace {

inline double blended(double old_value, double alpha, double reward, double delta,
                      double max_next) {
  return (1.0 - alpha) * old_value + alpha * (reward + delta * max_next);
}

inline int row_argmax(const double* row, int m) {
  int best = 0;
  for (int a = 1; a < m; ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

}  // namespace

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 15; ++i) grid.push_back(3.0 * i);
  return grid;
}

void LearnerConfig::validate() const {
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  // Values of beta >= 1 are accepted: they give (almost) pure exploitation
  // after the first period, which tests rely on.
  if (!(beta > 0) || !std::isfinite(beta)) throw InvalidArgument(fmt::format("beta must be positive, got {}", beta));
  if (!(delta >= 0 && delta < 1)) throw InvalidArgument(fmt::format("delta must lie in [0, 1), got {}", delta));
  if (k != 0 && k != 1) throw InvalidArgument(fmt::format("memory length k must be 0 or 1, got {}", k));
  if (grid.size() < 2) throw InvalidArgument("action grid needs at least two quantities");
  if (grid.front() < 0) throw InvalidArgument("action grid must be non-negative");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("action grid must be strictly increasing");
  }
  if (!(q_init_low <= q_init_high)) throw InvalidArgument("Q initialisation bounds are inverted");
}

StateCodec::StateCodec(int m, int k) : m_(m), k_(k) {
  if (m < 1) throw InvalidArgument("codec needs at least one action");
  if (k != 0 && k != 1) throw InvalidArgument(fmt::format("memory length k must be 0 or 1, got {}", k));
  num_states_ = k == 0 ? 1 : static_cast<std::size_t>(m) * m;
}

std::array<int, 2> StateCodec::decode(std::size_t state) const {
  if (state >= num_states_) throw InvalidArgument(fmt::format("state {} out of range", state));
  if (k_ == 0) return {0, 0};
  return {static_cast<int>(state / m_), static_cast<int>(state % m_)};
}

int QMatrix::greedy(std::size_t s) const {
  return row_argmax(values_.data() + s * actions_, static_cast<int>(actions_));
}

double QAgent::update(std::size_t s, int a, double reward, std::size_t s_next) {
  const double max_next = q.max_value(s_next);
  double& cell = q(s, a);
  cell = blended(cell, alpha, reward, delta, max_next);
  return cell;
}

double epsilon(double t, double beta) {
  if (t < 0) throw InvalidArgument("period index must be non-negative");
  return std::exp(-beta * t);
}

int select_action(const QAgent& agent, std::size_t state, double eps, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < eps) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(agent.q.actions()) - 1);
    return pick(rng);
  }
  return agent.q.greedy(state);
}

int select_action(const QAgent& agent, std::size_t state, std::int64_t t, double beta,
                  Rng& rng) {
  return select_action(agent, state, epsilon(static_cast<double>(t), beta), rng);
}

namespace {

double visit_ratio(int m, int n, int k) {
  return std::pow(m - 1.0, n) / std::pow(static_cast<double>(m), k * n + n + 1);
}

}  // namespace

double beta_from_nu(double nu, int m, int n, int k) {
  if (!(nu > 0)) throw InvalidArgument(fmt::format("nu must be positive, got {}", nu));
  const double x = visit_ratio(m, n, k) / nu;
  if (!(x > 0 && x < 1)) {
    throw Infeasible(fmt::format("nu = {} is not reachable for m={}, n={}, k={}", nu, m, n, k));
  }
  return -std::log1p(-x) / (n + 1);
}

double nu_from_beta(double beta, int m, int n, int k) {
  if (!(beta > 0)) throw InvalidArgument(fmt::format("beta must be positive, got {}", beta));
  return visit_ratio(m, n, k) / -std::expm1(-beta * (n + 1));
}

std::pair<std::vector<JointAction>, std::size_t> greedy_cycle(const QMatrix& q_L,
                                                              const QMatrix& q_H,
                                                              const StateCodec& codec,
                                                              std::size_t start) {
  std::vector<int> first_visit(codec.num_states(), -1);
  std::vector<std::size_t> path;
  std::vector<JointAction> actions;
  std::size_t s = start;
  while (first_visit[s] < 0) {
    first_visit[s] = static_cast<int>(path.size());
    path.push_back(s);
    const JointAction joint{q_L.greedy(s), q_H.greedy(s)};
    actions.push_back(joint);
    s = codec.encode(joint.L, joint.H);
  }
  const auto begin = static_cast<std::size_t>(first_visit[s]);
  return {std::vector<JointAction>(actions.begin() + begin, actions.end()), path[begin]};
}

EpisodeResult run_episode(const MarketParams& params, const LearnerConfig& cfg,
                          std::uint64_t seed, const EpisodeLimits& limits,
                          const EpisodeInit& init) {
  params.validate();
  cfg.validate();
  if (limits.max_periods < limits.convergence_window) {
    throw InvalidArgument("max_periods must be at least the convergence window");
  }
  if (limits.convergence_window < 1) throw InvalidArgument("convergence window must be positive");
  if (limits.post_rounds < 1) throw InvalidArgument("post_rounds must be positive");

  const int m = cfg.m();
  const StateCodec codec(m, cfg.k);
  const std::size_t num_states = codec.num_states();

  // Per joint action (a_L * m + a_H): both firms' one-period profits.
  std::vector<Outcome> stage(static_cast<std::size_t>(m) * m);
  for (int l = 0; l < m; ++l) {
    for (int h = 0; h < m; ++h) stage[l * m + h] = outcome_from_quantities(params, cfg.grid[l], cfg.grid[h]);
  }

  Rng rng(seed);
  std::array<QMatrix, 2> q;
  if (init.q) {
    q = *init.q;
    for (const auto& mat : q) {
      if (mat.states() != num_states || mat.actions() != static_cast<std::size_t>(m)) {
        throw InvalidArgument("initial Q-matrix has the wrong shape");
      }
    }
  } else {
    std::uniform_real_distribution<double> draw(cfg.q_init_low, cfg.q_init_high);
    for (auto& mat : q) {
      mat = QMatrix(num_states, m);
      for (double& v : mat.data()) v = draw(rng);
    }
  }

  std::size_t s = 0;
  if (init.state) {
    if (*init.state >= num_states) throw InvalidArgument("initial state out of range");
    s = *init.state;
  } else {
    std::uniform_int_distribution<int> pick(0, m - 1);
    const int l = pick(rng);
    const int h = pick(rng);
    s = codec.encode(l, h);
  }

  std::array<std::vector<int>, 2> greedy;
  for (int i = 0; i < 2; ++i) {
    greedy[i].resize(num_states);
    for (std::size_t st = 0; st < num_states; ++st) greedy[i][st] = q[i].greedy(st);
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, m - 1);
  const double alpha = cfg.alpha;
  const double delta = cfg.delta;

  EpisodeResult result;
  std::int64_t t = 0;
  std::int64_t stable = 0;
  while (t < limits.max_periods) {
    const double eps = std::exp(-cfg.beta * static_cast<double>(t));
    std::array<int, 2> act;
    for (int i = 0; i < 2; ++i) {
      act[i] = unit(rng) < eps ? pick(rng) : greedy[i][s];
    }
    const Outcome& o = stage[act[0] * m + act[1]];
    const std::array<double, 2> reward{o.pi_L, o.pi_H};
    const std::size_t s_next = codec.encode(act[0], act[1]);

    bool changed = false;
    for (int i = 0; i < 2; ++i) {
      const double max_next = q[i](s_next, greedy[i][s_next]);
      double& cell = q[i](s, act[i]);
      cell = blended(cell, alpha, reward[i], delta, max_next);
      const int g = row_argmax(&q[i](s, 0), m);
      if (g != greedy[i][s]) {
        greedy[i][s] = g;
        changed = true;
      }
    }
    stable = changed ? 0 : stable + 1;
    s = s_next;
    ++t;
    if (stable >= limits.convergence_window) {
      result.converged = true;
      break;
    }
  }
  result.periods = t;
  result.end_state = s;

  if (result.converged) {
    Outcome sum;
    std::size_t st = s;
    for (int r = 0; r < limits.post_rounds; ++r) {
      const int l = greedy[0][st];
      const int h = greedy[1][st];
      const Outcome& o = stage[l * m + h];
      sum.q_L += o.q_L;
      sum.q_H += o.q_H;
      sum.Q += o.Q;
      sum.p += o.p;
      sum.pi_L += o.pi_L;
      sum.pi_H += o.pi_H;
      sum.PS += o.PS;
      sum.CS += o.CS;
      sum.TS += o.TS;
      st = codec.encode(l, h);
    }
    const double n = limits.post_rounds;
    result.post_play = Outcome{sum.q_L / n, sum.q_H / n, sum.Q / n,  sum.p / n, sum.pi_L / n,
                               sum.pi_H / n, sum.PS / n, sum.CS / n, sum.TS / n};
    auto [cycle, anchor] = greedy_cycle(q[0], q[1], codec, s);
    result.post_cycle = std::move(cycle);
    result.cycle_anchor = anchor;
  }
  result.final_q = std::move(q);
  return result;
}

}  // namespace cournot

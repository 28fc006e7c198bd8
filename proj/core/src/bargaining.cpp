#include "cournot/bargaining.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cournot/error.hpp"
#include "cournot/line_search.hpp"

namespace cournot {

namespace {

constexpr double kEdge = 1e-9;       // bisection bracket inset
constexpr double kPriceInset = 1e-12;  // keeps p - c strictly positive

void check_firm(int firm) {
  if (firm != 0 && firm != 1) throw InvalidArgument(fmt::format("firm id must be 0 or 1, got {}", firm));
}

// Largest profit of firm H given firm L's profit, as a scalar function.
double frontier_H(const MarketParams& params, double pi_L) {
  return frontier_value(params, pi_L, 0).pi_H;
}

}  // namespace

double monopoly_profit(const MarketParams& params, int firm) {
  check_firm(firm);
  const double margin = std::max(params.a - params.cost(firm), 0.0);
  return margin * margin / (4 * params.b);
}

FrontierPoint frontier_value(const MarketParams& params, double pi_i, int i) {
  check_firm(i);
  const int j = 1 - i;
  const double c_i = params.cost(i);
  const double c_j = params.cost(j);
  const double m_i = monopoly_profit(params, i);
  if (!(pi_i >= 0)) throw InvalidArgument(fmt::format("profit target must be >= 0, got {}", pi_i));
  if (pi_i > m_i * (1 + 1e-12)) {
    throw Infeasible(fmt::format("profit {} exceeds firm {} monopoly profit {}", pi_i,
                                 i == 0 ? "L" : "H", m_i));
  }

  auto rival_profit = [&](double p) {
    return ((params.a - p) / params.b - pi_i / (p - c_i)) * (p - c_j);
  };
  const double lo = std::max(params.c_L, params.c_H) + kPriceInset;
  const auto best = golden_section_maximize(rival_profit, lo, params.a);

  const double scale = std::max(1.0, m_i);
  if (best.value < -1e-9 * scale) {
    throw Infeasible(fmt::format("no price supports profit {} for firm {}", pi_i, i == 0 ? "L" : "H"));
  }
  const double p = best.x;
  const double q_i = pi_i / (p - c_i);
  const double q_j = std::max((params.a - p) / params.b - q_i, 0.0);
  const double pi_j = std::max(best.value, 0.0);

  FrontierPoint point;
  point.p = p;
  if (i == 0) {
    point.pi_L = pi_i;
    point.pi_H = pi_j;
    point.q_L = q_i;
    point.q_H = q_j;
  } else {
    point.pi_H = pi_i;
    point.pi_L = pi_j;
    point.q_H = q_i;
    point.q_L = q_j;
  }
  return point;
}

DisagreementPoint minmax_disagreement(const MarketParams& params) {
  DisagreementPoint dis{DisagreementKind::kMinMax, 0, 0};
  for (int firm = 0; firm < 2; ++firm) {
    const double c = params.cost(firm);
    const double q = std::clamp((params.a - c - params.b * params.q_max) / (2 * params.b), 0.0,
                                params.q_max);
    const double d = profit(params, c, q, q + params.q_max);
    (firm == 0 ? dis.d_L : dis.d_H) = std::max(d, 0.0);
  }
  return dis;
}

DisagreementPoint minmax_disagreement_on_grid(const MarketParams& params,
                                              std::span<const double> grid) {
  if (grid.empty()) throw InvalidArgument("empty action grid");
  const double flood = grid.back();
  DisagreementPoint dis{DisagreementKind::kMinMax, 0, 0};
  for (int firm = 0; firm < 2; ++firm) {
    double best = -INFINITY;
    for (double q : grid) best = std::max(best, profit(params, params.cost(firm), q, q + flood));
    (firm == 0 ? dis.d_L : dis.d_H) = best;
  }
  return dis;
}

DisagreementPoint nash_disagreement(const MarketParams& params) {
  const auto nash = nash_point(params).outcome;
  return {DisagreementKind::kNash, nash.pi_L, nash.pi_H};
}

FrontierPoint solve_ks(const MarketParams& params, const DisagreementPoint& dis) {
  const double m_L = monopoly_profit(params, 0);
  const double m_H = monopoly_profit(params, 1);
  if (!(m_L > dis.d_L && m_H > dis.d_H)) {
    throw SolverFailure("ks", "disagreement point is not below the monopoly profits");
  }
  // Standard two-sided condition: each firm's own disagreement and ideal.
  auto gap = [&](double pi_L) {
    return (pi_L - dis.d_L) / (m_L - dis.d_L) - (frontier_H(params, pi_L) - dis.d_H) / (m_H - dis.d_H);
  };
  const double x = bisect_root(gap, std::max(dis.d_L, kEdge), m_L - kEdge, "ks");
  return frontier_value(params, x, 0);
}

FrontierPoint solve_erg(const MarketParams& params, const DisagreementPoint& dis) {
  if (!(dis.d_L > 0 && dis.d_H > 0)) {
    throw InvalidArgument(fmt::format(
        "equal relative gains undefined for zero disagreement profit (d_L={}, d_H={})", dis.d_L,
        dis.d_H));
  }
  const double m_L = monopoly_profit(params, 0);
  auto gap = [&](double pi_L) { return pi_L / dis.d_L - frontier_H(params, pi_L) / dis.d_H; };
  const double x = bisect_root(gap, std::max(dis.d_L, kEdge), m_L - kEdge, "erg");
  return frontier_value(params, x, 0);
}

FrontierPoint solve_equal_split(const MarketParams& params) {
  const double m_L = monopoly_profit(params, 0);
  auto gap = [&](double pi_L) { return pi_L - frontier_H(params, pi_L); };
  const double x = bisect_root(gap, kEdge, m_L - kEdge, "equal_split");
  return frontier_value(params, x, 0);
}

Outcome outcome_from_frontier(const MarketParams& params, const FrontierPoint& point) {
  return outcome_unchecked(params, point.q_L, point.q_H);
}

std::vector<BenchmarkPoint> benchmark_suite(const MarketParams& params,
                                            const SuiteOptions& options) {
  params.validate();
  const auto minmax = options.grid_minmax ? minmax_disagreement_on_grid(params, options.grid)
                                          : minmax_disagreement(params);
  std::vector<BenchmarkPoint> out;
  out.reserve(kAllBenchmarks.size());
  for (auto label : kAllBenchmarks) {
    try {
      switch (label) {
        case BenchmarkLabel::kNash: out.push_back(nash_point(params)); break;
        case BenchmarkLabel::kMonopoly: out.push_back(monopoly_point(params)); break;
        case BenchmarkLabel::kAltMonopoly:
          out.push_back(alternating_monopoly_point(params, options.omega, options.lottery_surplus));
          break;
        case BenchmarkLabel::kErg:
          out.push_back({label, outcome_from_frontier(params, solve_erg(params, minmax))});
          break;
        case BenchmarkLabel::kEqualSplit:
          out.push_back({label, outcome_from_frontier(params, solve_equal_split(params))});
          break;
        case BenchmarkLabel::kKs:
          out.push_back({label, outcome_from_frontier(params, solve_ks(params, minmax))});
          break;
        case BenchmarkLabel::kErgNash:
          out.push_back(
              {label, outcome_from_frontier(params, solve_erg(params, nash_disagreement(params)))});
          break;
        case BenchmarkLabel::kKsNash:
          out.push_back(
              {label, outcome_from_frontier(params, solve_ks(params, nash_disagreement(params)))});
          break;
      }
    } catch (const SolverFailure& e) {
      throw SolverFailure(std::string(to_string(label)), e.detail());
    } catch (const Error& e) {
      throw SolverFailure(std::string(to_string(label)), e.what());
    }
  }
  return out;
}

}  // namespace cournot

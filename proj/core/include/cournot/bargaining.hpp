#pragma once

#include <span>
#include <vector>

#include "cournot/market.hpp"

namespace cournot {

enum class DisagreementKind { kNash, kMinMax };

struct DisagreementPoint {
  DisagreementKind kind = DisagreementKind::kNash;
  double d_L = 0;
  double d_H = 0;
};

/// A point on the Pareto profit frontier with the price that supports it.
struct FrontierPoint {
  double pi_L = 0, pi_H = 0;
  double p = 0;
  double q_L = 0, q_H = 0;
};

/// Monopoly profit of firm `firm` (0 = L, 1 = H) serving the market alone.
double monopoly_profit(const MarketParams& params, int firm);

/// Largest profit firm j = 1 - i can earn when firm i earns `pi_i`:
///   max over p in (max(c_L, c_H), a) of ((a - p)/b - pi_i/(p - c_i)) (p - c_j).
/// The inner maximisation is a golden-section search; throws Infeasible when
/// pi_i exceeds firm i's monopoly profit.
FrontierPoint frontier_value(const MarketParams& params, double pi_i, int i);

/// Best profit of each firm against a rival producing q_max, over continuous
/// quantities in [0, q_max].
DisagreementPoint minmax_disagreement(const MarketParams& params);

/// Grid variant of minmax_disagreement: both the firm's reply and the rival's
/// flooding quantity are restricted to `grid` (rival plays grid.back()).
DisagreementPoint minmax_disagreement_on_grid(const MarketParams& params,
                                              std::span<const double> grid);

/// Static Nash profits as a disagreement point.
DisagreementPoint nash_disagreement(const MarketParams& params);

/// Kalai-Smorodinsky: equal relative progress from the disagreement point
/// towards each firm's monopoly profit,
///   (pi_L - d_L) / (M_L - d_L) = (pi_H - d_H) / (M_H - d_H).
FrontierPoint solve_ks(const MarketParams& params, const DisagreementPoint& dis);

/// Equal relative gains: pi_L / d_L = pi_H / d_H. Requires d_L, d_H > 0.
FrontierPoint solve_erg(const MarketParams& params, const DisagreementPoint& dis);

/// Frontier point with pi_L = pi_H.
FrontierPoint solve_equal_split(const MarketParams& params);

/// Market outcome implied by a frontier point.
Outcome outcome_from_frontier(const MarketParams& params, const FrontierPoint& point);

struct SuiteOptions {
  double omega = 0.5;
  LotterySurplus lottery_surplus = LotterySurplus::kOfExpectedQuantity;
  /// Compute min-max disagreement on the learners' grid instead of the
  /// continuous quantity space.
  bool grid_minmax = false;
  std::vector<double> grid;
};

/// All eight benchmarks in the order nash, monopoly, alt_monopoly, erg,
/// equal_split, ks, erg_nash, ks_nash. Unsuffixed ks/erg use the min-max
/// disagreement point, *_nash the static Nash profits.
std::vector<BenchmarkPoint> benchmark_suite(const MarketParams& params,
                                            const SuiteOptions& options = {});

}  // namespace cournot

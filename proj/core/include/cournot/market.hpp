#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace cournot {

/// One linear-demand duopoly instance. Firm L is the efficient one.
struct MarketParams {
  double a = 91.0;      // demand intercept
  double b = 1.0;       // demand slope
  double c_L = 19.0;    // marginal cost of the efficient firm
  double c_H = 19.0;    // marginal cost of the inefficient firm
  double q_max = 45.0;  // upper bound of each firm's quantity

  /// Throws InvalidArgument unless a > c_H >= c_L >= 0, b > 0, q_max > 0.
  void validate() const;

  double cost(int firm) const { return firm == 0 ? c_L : c_H; }

  friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

/// Market outcome for one quantity pair (or an expectation over several).
struct Outcome {
  double q_L = 0, q_H = 0;
  double Q = 0;
  double p = 0;
  double pi_L = 0, pi_H = 0;
  double PS = 0, CS = 0, TS = 0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

enum class BenchmarkLabel {
  kNash,
  kMonopoly,
  kAltMonopoly,
  kErg,
  kEqualSplit,
  kKs,
  kErgNash,
  kKsNash,
};

inline constexpr std::array<BenchmarkLabel, 8> kAllBenchmarks = {
    BenchmarkLabel::kNash,    BenchmarkLabel::kMonopoly,   BenchmarkLabel::kAltMonopoly,
    BenchmarkLabel::kErg,     BenchmarkLabel::kEqualSplit, BenchmarkLabel::kKs,
    BenchmarkLabel::kErgNash, BenchmarkLabel::kKsNash,
};

/// Short identifier used in files: nash, monopoly, alt_monopoly, erg, ...
std::string_view to_string(BenchmarkLabel label);
/// Long human-readable name ("Equal Relative Gains (Nash)").
std::string_view display_name(BenchmarkLabel label);
std::optional<BenchmarkLabel> parse_benchmark_label(std::string_view text);

struct BenchmarkPoint {
  BenchmarkLabel label = BenchmarkLabel::kNash;
  Outcome outcome;
};

/// Inverse demand max(a - bQ, 0). Throws InvalidArgument for Q < 0.
double price(const MarketParams& params, double total_quantity);

/// Profit of a firm with marginal cost `cost` producing `own` out of `total`.
/// Not floored at zero.
double profit(const MarketParams& params, double cost, double own, double total);

/// Full outcome for a quantity pair; quantities must lie in [0, q_max].
Outcome outcome_from_quantities(const MarketParams& params, double q_L, double q_H);

/// Same as outcome_from_quantities without the range check. Used for points
/// reconstructed from the profit frontier.
Outcome outcome_unchecked(const MarketParams& params, double q_L, double q_H);

/// Static Cournot-Nash equilibrium. Throws Unsupported for corner equilibria.
BenchmarkPoint nash_point(const MarketParams& params);

/// Joint profit maximisation: only firm L produces (a - c_L) / 2b.
BenchmarkPoint monopoly_point(const MarketParams& params);

/// How consumer and total surplus of the alternating monopoly are aggregated.
enum class LotterySurplus {
  /// CS from the expected total quantity, b E[Q]^2 / 2 (keeps CS = bQ^2/2).
  kOfExpectedQuantity,
  /// State-wise expectation of CS, E[b Q^2 / 2].
  kStateWise,
};

/// Firm L is the monopolist with probability omega, firm H otherwise.
/// Quantities, price and profits are expectations over the two states.
BenchmarkPoint alternating_monopoly_point(
    const MarketParams& params, double omega = 0.5,
    LotterySurplus surplus = LotterySurplus::kOfExpectedQuantity);

}  // namespace cournot

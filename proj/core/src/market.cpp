#include "cournot/market.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cournot/error.hpp"

namespace cournot {

void MarketParams::validate() const {
  if (!(b > 0)) throw InvalidArgument(fmt::format("demand slope must be positive, got {}", b));
  if (!(q_max > 0)) throw InvalidArgument(fmt::format("q_max must be positive, got {}", q_max));
  if (!(c_L >= 0 && c_H >= c_L && a > c_H)) {
    throw InvalidArgument(
        fmt::format("need a > c_H >= c_L >= 0, got a={} c_L={} c_H={}", a, c_L, c_H));
  }
}

std::string_view to_string(BenchmarkLabel label) {
  switch (label) {
    case BenchmarkLabel::kNash: return "nash";
    case BenchmarkLabel::kMonopoly: return "monopoly";
    case BenchmarkLabel::kAltMonopoly: return "alt_monopoly";
    case BenchmarkLabel::kErg: return "erg";
    case BenchmarkLabel::kEqualSplit: return "equal_split";
    case BenchmarkLabel::kKs: return "ks";
    case BenchmarkLabel::kErgNash: return "erg_nash";
    case BenchmarkLabel::kKsNash: return "ks_nash";
  }
  return "?";
}

std::string_view display_name(BenchmarkLabel label) {
  switch (label) {
    case BenchmarkLabel::kNash: return "Nash";
    case BenchmarkLabel::kMonopoly: return "Monopoly";
    case BenchmarkLabel::kAltMonopoly: return "Alternating Monopoly";
    case BenchmarkLabel::kErg: return "Equal Relative Gains";
    case BenchmarkLabel::kEqualSplit: return "Equal Split";
    case BenchmarkLabel::kKs: return "Kalai-Smorodinsky";
    case BenchmarkLabel::kErgNash: return "Equal Relative Gains (Nash)";
    case BenchmarkLabel::kKsNash: return "Kalai-Smorodinsky (Nash)";
  }
  return "?";
}

std::optional<BenchmarkLabel> parse_benchmark_label(std::string_view text) {
  for (auto label : kAllBenchmarks) {
    if (to_string(label) == text) return label;
  }
  return std::nullopt;
}

double price(const MarketParams& params, double total_quantity) {
  if (total_quantity < 0 || std::isnan(total_quantity)) {
    throw InvalidArgument(fmt::format("total quantity must be non-negative, got {}", total_quantity));
  }
  return std::max(params.a - params.b * total_quantity, 0.0);
}

double profit(const MarketParams& params, double cost, double own, double total) {
  return (price(params, total) - cost) * own;
}

Outcome outcome_unchecked(const MarketParams& params, double q_L, double q_H) {
  Outcome o;
  o.q_L = q_L;
  o.q_H = q_H;
  o.Q = q_L + q_H;
  o.p = price(params, o.Q);
  o.pi_L = (o.p - params.c_L) * q_L;
  o.pi_H = (o.p - params.c_H) * q_H;
  o.PS = o.pi_L + o.pi_H;
  o.CS = params.b * o.Q * o.Q / 2.0;
  o.TS = o.PS + o.CS;
  return o;
}

Outcome outcome_from_quantities(const MarketParams& params, double q_L, double q_H) {
  auto in_range = [&](double q) { return q >= 0 && q <= params.q_max; };
  if (!in_range(q_L) || !in_range(q_H)) {
    throw InvalidArgument(
        fmt::format("quantities must lie in [0, {}], got q_L={} q_H={}", params.q_max, q_L, q_H));
  }
  return outcome_unchecked(params, q_L, q_H);
}

BenchmarkPoint nash_point(const MarketParams& params) {
  const double q_L = (params.a - 2 * params.c_L + params.c_H) / (3 * params.b);
  const double q_H = (params.a - 2 * params.c_H + params.c_L) / (3 * params.b);
  if (q_L <= 0 || q_H <= 0) {
    throw Unsupported(fmt::format(
        "Nash equilibrium is a corner solution (q_L={}, q_H={}); only interior equilibria are "
        "supported",
        q_L, q_H));
  }
  return {BenchmarkLabel::kNash, outcome_unchecked(params, q_L, q_H)};
}

namespace {

double monopoly_quantity(const MarketParams& params, double cost) {
  return std::max((params.a - cost) / (2 * params.b), 0.0);
}

Outcome weighted(const Outcome& x, double wx, const Outcome& y, double wy) {
  Outcome o;
  o.q_L = wx * x.q_L + wy * y.q_L;
  o.q_H = wx * x.q_H + wy * y.q_H;
  o.Q = wx * x.Q + wy * y.Q;
  o.p = wx * x.p + wy * y.p;
  o.pi_L = wx * x.pi_L + wy * y.pi_L;
  o.pi_H = wx * x.pi_H + wy * y.pi_H;
  o.PS = wx * x.PS + wy * y.PS;
  o.CS = wx * x.CS + wy * y.CS;
  o.TS = wx * x.TS + wy * y.TS;
  return o;
}

}  // namespace

BenchmarkPoint monopoly_point(const MarketParams& params) {
  return {BenchmarkLabel::kMonopoly,
          outcome_unchecked(params, monopoly_quantity(params, params.c_L), 0.0)};
}

BenchmarkPoint alternating_monopoly_point(const MarketParams& params, double omega,
                                          LotterySurplus surplus) {
  if (!(omega >= 0 && omega <= 1)) {
    throw InvalidArgument(fmt::format("omega must lie in [0, 1], got {}", omega));
  }
  const Outcome l_serves = outcome_unchecked(params, monopoly_quantity(params, params.c_L), 0.0);
  const Outcome h_serves = outcome_unchecked(params, 0.0, monopoly_quantity(params, params.c_H));
  Outcome o = weighted(l_serves, omega, h_serves, 1.0 - omega);
  if (surplus == LotterySurplus::kOfExpectedQuantity) {
    o.CS = params.b * o.Q * o.Q / 2.0;
    o.TS = o.PS + o.CS;
  }
  return {BenchmarkLabel::kAltMonopoly, o};
}

}  // namespace cournot

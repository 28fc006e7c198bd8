#include "cournot/line_search.hpp"

#include <algorithm>
#include <cmath>

#include "cournot/error.hpp"

namespace cournot {

LineSearchResult golden_section_maximize(const std::function<double(double)>& f, double lo,
                                         double hi, double rel_tol, int max_iterations) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(0.5 * (lo + hi)))) break;
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  // Best evaluated interior point; the midpoint is only a fallback.
  const double mid = 0.5 * (lo + hi);
  const double fm = f(mid);
  LineSearchResult best{mid, fm, it};
  if (f1 > best.value) best = {x1, f1, it};
  if (f2 > best.value) best = {x2, f2, it};
  return best;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   const char* label, double abs_tol, int max_iterations) {
  double f_lo = f(lo);
  if (f_lo == 0) return lo;
  const double f_hi = f(hi);
  if (f_hi == 0) return hi;
  if ((f_lo < 0) == (f_hi < 0)) {
    throw SolverFailure(label, "no sign change in bisection bracket");
  }
  for (int it = 0; it < max_iterations && hi - lo > abs_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0) return mid;
    if ((f_mid < 0) == (f_lo < 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cournot

#pragma once

#include <functional>

namespace cournot {

struct LineSearchResult {
  double x = 0;
  double value = 0;
  int iterations = 0;
};

/// Golden-section maximisation of a unimodal function on [lo, hi].
/// Stops when the bracket is narrower than rel_tol * max(1, |x|) or after
/// max_iterations.
LineSearchResult golden_section_maximize(const std::function<double(double)>& f, double lo,
                                         double hi, double rel_tol = 1e-9,
                                         int max_iterations = 200);

/// Root of a function that changes sign on [lo, hi], by bisection. If either
/// endpoint already evaluates to zero it is returned as is. Throws
/// SolverFailure tagged with `label` when f(lo) and f(hi) share a strict sign.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   const char* label, double abs_tol = 1e-12, int max_iterations = 200);

}  // namespace cournot

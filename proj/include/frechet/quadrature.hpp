#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

namespace frechet {

struct SimpsonOptions {
  double abs_tolerance = 1e-10;
  std::size_t max_depth = 30;
};

struct SimpsonStats {
  std::size_t evaluations = 0;
  std::size_t max_depth_reached = 0;
  bool depth_limited = false;
};

namespace detail {

template <class F, class V, class Norm>
V simpson_step(F& f, Norm& norm, double a, double b, const V& fa, const V& fm, const V& fb,
               const V& whole, double tol, std::size_t depth, const SimpsonOptions& opts,
               SimpsonStats& stats) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  V flm = f(lm);
  V frm = f(rm);
  stats.evaluations += 2;
  stats.max_depth_reached = std::max(stats.max_depth_reached, depth);

  const double h6 = (b - a) / 12.0;
  V left = (fa + 4.0 * flm + fm) * h6;
  V right = (fm + 4.0 * frm + fb) * h6;
  V both = left + right;
  const double err = norm(both - whole);
  if (err <= 15.0 * tol) {
    // Richardson correction.
    return both + (both - whole) * (1.0 / 15.0);
  }
  if (depth >= opts.max_depth) {
    stats.depth_limited = true;
    return both + (both - whole) * (1.0 / 15.0);
  }
  V l = simpson_step(f, norm, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, opts, stats);
  V r = simpson_step(f, norm, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, opts, stats);
  return l + r;
}

}  // namespace detail

/**
 * Adaptive Simpson quadrature of a vector-valued integrand over [a, b].
 *
 * V needs +, - and multiplication by double; `norm` measures the local
 * error estimate. b < a integrates backwards.
 */
template <class F, class Norm>
auto adaptive_simpson(F f, Norm norm, double a, double b, const SimpsonOptions& opts = {},
                      SimpsonStats* stats_out = nullptr) {
  using V = decltype(f(a));
  SimpsonStats stats;
  V fa = f(a);
  V fb = f(b);
  V fm = f(0.5 * (a + b));
  stats.evaluations = 3;
  V whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
  V result = detail::simpson_step(f, norm, a, b, fa, fm, fb, whole, opts.abs_tolerance, 0, opts,
                                  stats);
  if (stats_out) *stats_out = stats;
  return result;
}

}  // namespace frechet

// Bracketed scalar root finding: bisection interleaved with secant steps,
// plus a derivative-accelerated variant.  All solvers require an enclosing
// bracket and never step outside it, so they are safe on the monotone but
// occasionally stiff residuals that show up in hitting-time equations.
#pragma once

#include <cmath>
#include <utility>

#include "bequest/common.hpp"

namespace bequest {

struct RootConfig {
  double f_tol = 1e-10;   // accept when |f(x)| falls below this
  double x_tol = 1e-12;   // ... or when the bracket is this tight
  int max_iter = 200;
};

namespace detail {
inline bool opposite_signs(double a, double b) {
  return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0);
}
}  // namespace detail

// Root of f on [lo, hi] given f(lo) and f(hi) of opposite sign (either may
// be zero).  Each iteration tries a secant step; whenever that step leaves
// the bracket or fails to shrink it meaningfully, a bisection step is
// taken instead, so convergence is guaranteed.
template <class F>
double solve_bracketed(F&& f, double lo, double hi, RootConfig cfg = {}) {
  double fl = f(lo);
  if (std::abs(fl) <= cfg.f_tol) return lo;
  double fh = f(hi);
  if (std::abs(fh) <= cfg.f_tol) return hi;
  if (!detail::opposite_signs(fl, fh))
    throw numerical_error("solve_bracketed: no sign change on [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "], f = " + std::to_string(fl) +
                          " .. " + std::to_string(fh));
  double a = lo, b = hi, fa = fl, fb = fh;
  for (int it = 0; it < cfg.max_iter; ++it) {
    double mid = 0.5 * (a + b);
    double x = mid;
    if (fb != fa) {
      double s = b - fb * (b - a) / (fb - fa);  // secant through the bracket ends
      double lo_ok = a + 0.01 * (b - a), hi_ok = b - 0.01 * (b - a);
      if (s > lo_ok && s < hi_ok) x = s;
    }
    double fx = f(x);
    if (std::abs(fx) <= cfg.f_tol || b - a <= cfg.x_tol * (1.0 + std::abs(x))) return x;
    if (detail::opposite_signs(fa, fx)) {
      b = x; fb = fx;
    } else {
      a = x; fa = fx;
    }
  }
  throw numerical_error("solve_bracketed: no convergence after " +
                        std::to_string(cfg.max_iter) + " iterations");
}

// Newton iteration guarded by a bracket; df is the derivative.  Steps that
// leave the bracket (or would divide by a vanishing derivative) fall back
// to bisection, and the bracket is updated from the sign of each residual.
template <class F, class D>
double solve_newton(F&& f, D&& df, double lo, double hi, RootConfig cfg = {}) {
  double fa = f(lo);
  if (std::abs(fa) <= cfg.f_tol) return lo;
  double fb = f(hi);
  if (std::abs(fb) <= cfg.f_tol) return hi;
  if (!detail::opposite_signs(fa, fb))
    throw numerical_error("solve_newton: no sign change on bracket");
  double a = lo, b = hi;
  double x = 0.5 * (a + b);
  for (int it = 0; it < cfg.max_iter; ++it) {
    double fx = f(x);
    if (std::abs(fx) <= cfg.f_tol || b - a <= cfg.x_tol * (1.0 + std::abs(x))) return x;
    if (detail::opposite_signs(fa, fx)) b = x; else { a = x; fa = fx; }
    double d = df(x);
    double step = (d != 0.0) ? fx / d : kInf;
    double next = x - step;
    x = (std::isfinite(next) && next > a && next < b) ? next : 0.5 * (a + b);
  }
  throw numerical_error("solve_newton: no convergence after " +
                        std::to_string(cfg.max_iter) + " iterations");
}

// Smallest x in [lo, hi] where a monotone false->true predicate turns
// true.  Returns hi when the predicate is false throughout.
template <class P>
double bisect_predicate(P&& pred, double lo, double hi, double x_tol = 1e-11) {
  if (pred(lo)) return lo;
  if (!pred(hi)) return hi;
  for (int it = 0; it < 200 && hi - lo > x_tol * (1.0 + std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace bequest

// Globally adaptive Gauss-Kronrod 7/15 quadrature.  The worst interval
// (largest error estimate) is bisected until the summed estimate meets the
// requested tolerance.  Callers may seed the subdivision with interior
// breakpoints so piecewise integrands are never straddled by a panel.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bequest/common.hpp"

namespace bequest {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_subdivisions = 2000;
};

namespace detail {

// 15-point Kronrod abscissae on [0, 1] side (symmetric), embedded 7-point
// Gauss rule on the odd-indexed nodes.  Standard double-precision values.
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b, value, error;
};

// One Kronrod-15 evaluation over [a, b]; error estimated from the gap to
// the embedded Gauss-7 result.  All nodes are interior, so integrable
// endpoint singularities are never evaluated exactly at the endpoint.
template <class F>
Panel gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double k = kWgk[7] * fc, g = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    double fl = f(c - h * kXgk[i]), fr = f(c + h * kXgk[i]);
    k += kWgk[i] * (fl + fr);
    if (i % 2 == 1) g += kWg[i / 2] * (fl + fr);
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace detail

// Integrate f over consecutive intervals delimited by `points` (ascending,
// at least two entries).  Throws numerical_error with diagnostics when the
// subdivision budget is exhausted before the tolerance is met.
template <class F>
double integrate_segmented(F&& f, const std::vector<double>& points,
                           const QuadratureConfig& cfg = {}) {
  std::vector<detail::Panel> panels;
  panels.reserve(64);
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    if (points[i + 1] > points[i])
      panels.push_back(detail::gk15(f, points[i], points[i + 1]));
  if (panels.empty()) return 0.0;
  auto total = [&] {
    double v = 0.0, e = 0.0;
    for (const auto& p : panels) { v += p.value; e += p.error; }
    return std::pair{v, e};
  };
  for (int n = 0; n < cfg.max_subdivisions; ++n) {
    auto [value, error] = total();
    if (error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))) return value;
    auto worst = std::max_element(panels.begin(), panels.end(),
                                  [](const auto& x, const auto& y) { return x.error < y.error; });
    double a = worst->a, b = worst->b, mid = 0.5 * (a + b);
    *worst = detail::gk15(f, a, mid);
    panels.push_back(detail::gk15(f, mid, b));
  }
  auto [value, error] = total();
  throw numerical_error("quadrature: tolerance not met after " +
                        std::to_string(cfg.max_subdivisions) + " subdivisions (estimate " +
                        std::to_string(value) + ", error " + std::to_string(error) + ")");
}

template <class F>
double integrate(F&& f, double a, double b, const QuadratureConfig& cfg = {}) {
  return integrate_segmented(std::forward<F>(f), {a, b}, cfg);
}

}  // namespace bequest

// Actuarial present values for instantaneous term insurance under a
// proportionally loaded premium rate h(t) = (1 + theta) * lambda(t).
//
// The central quantity is the "safe level"
//     wbar(t) = integral_t^T h(s) exp(-integral_t^s (r + h)) ds,
// the loaded whole-life insurance value: with wealth wbar(t) one can fund
// full coverage forever, so the bequest target is reachable with
// certainty.  The inner exponent is r (s - t) plus (1 + theta) times the
// cumulative hazard, i.e. discounting times a power of survival, so the
// same closed-form hazard machinery backs both survival and these values.
#pragma once

#include <algorithm>
#include <cmath>

#include "bequest/common.hpp"
#include "bequest/mortality.hpp"
#include "bequest/quadrature.hpp"

namespace bequest {

struct ProblemSpec {
  MortalityLaw law;
  double r = 0.0;      // force of interest, >= 0
  double theta = 0.0;  // proportional premium loading, >= 0
  QuadratureConfig quad{};

  ProblemSpec(MortalityLaw law_, double r_, double theta_ = 0.0, QuadratureConfig q = {})
      : law(std::move(law_)), r(r_), theta(theta_), quad(q) {
    domain_check(r >= 0.0, "ProblemSpec: r must be >= 0");
    domain_check(theta >= 0.0, "ProblemSpec: theta must be >= 0");
  }
};

// Premium rate per unit of coverage.
inline double premium_rate(const ProblemSpec& spec, double t) {
  return (1.0 + spec.theta) * hazard(spec.law, t);
}

namespace detail {

// Loaded survival drops below 1e-12 beyond this cumulative-hazard budget;
// integral tails past that point contribute less than 1e-12 and are cut.
inline constexpr double kHazardBudget = 27.631021115928547;  // -log(1e-12)

}  // namespace detail

// Time at which the loaded survival factor from t has decayed to 1e-12
// (capped at T).  Integration horizons and full-insurance hitting times
// are truncated here for infinite-horizon laws.
inline double truncation_horizon(const ProblemSpec& spec, double t) {
  double budget = detail::kHazardBudget / (1.0 + spec.theta);
  double T = horizon(spec.law);
  if (std::isfinite(T) && cumulative_hazard(spec.law, t, T) <= budget) return T;
  return std::min(T, inverse_cumulative_hazard(spec.law, t, budget));
}

// Present value at t of term insurance paying 1 at death before t + n,
// priced with the loaded rate k = (1 + theta) lambda (or the bare hazard
// when loaded = false):
//     integral_t^{t+n} k(s) e^{-r (s-t)} survival(t, s)^{k/lambda} ds.
inline double term_apv(const ProblemSpec& spec, double t, double n, bool loaded = true) {
  const double T = horizon(spec.law);
  domain_check(t >= 0.0 && t < T, "term_apv: t must be in [0, T)");
  domain_check(n >= 0.0, "term_apv: n must be >= 0");
  if (n == 0.0) return 0.0;
  const double m = loaded ? 1.0 + spec.theta : 1.0;
  double hi = std::min(t + n, truncation_horizon(spec, t));
  // Finite-horizon hazards diverge at T (survival reaches zero there), so
  // quadrature must stop short of it.  The last sliver [T - pad, T] holds
  // exactly the remaining loaded survival mass, and the discount factor
  // moves by less than r * pad across it, so it is added in closed form.
  // Upper limits inside that sliver are treated as reaching T.
  double tail = 0.0;
  if (std::isfinite(T) && hi >= T - detail::kHorizonPad) {
    hi = std::max(t, T - detail::kHorizonPad);
    tail = std::exp(-spec.r * (hi - t) - m * cumulative_hazard(spec.law, t, hi));
  }
  if (hi <= t) return tail;
  auto f = [&](double s) {
    return m * hazard(spec.law, s) *
           std::exp(-spec.r * (s - t) - m * cumulative_hazard(spec.law, t, s));
  };
  return integrate_segmented(f, hazard_breakpoints(spec.law, t, hi), spec.quad) + tail;
}

// The safe level wbar(t): loaded whole-life value, in [0, 1].
inline double safe_level(const ProblemSpec& spec, double t) {
  double T = horizon(spec.law);
  double n = std::isfinite(T) ? T - t : kInf;
  return std::min(1.0, term_apv(spec, t, n, /*loaded=*/true));
}

// d wbar / dt = (r + h(t)) wbar(t) - h(t); used by grid checkers that
// differentiate along safe-level-scaled coordinates.
inline double safe_level_derivative(const ProblemSpec& spec, double t) {
  double h = premium_rate(spec, t);
  return (spec.r + h) * safe_level(spec, t) - h;
}

}  // namespace bequest

// Bequest-goal values of the two benchmark insurance strategies, as
// functions of wealth w (bequest target scaled to 1) and age t:
//
//   * "full": buy term coverage D = 1 - W continuously until wealth is
//     exhausted at the hitting time tf, where w = term value of coverage
//     over [t, tf].  Success means dying before tf, so
//         phi_full = 1 - survival(t, tf).
//   * "wait": buy nothing until wealth grows to the safe level at t0,
//     where w e^{r (t0 - t)} = wbar(t0).  Success means surviving to t0:
//         phi_wait = survival(t, t0).
//
// Both values come with analytic wealth derivatives, used by gradient
// checks and by the variational-inequality verifier.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "bequest/actuarial.hpp"
#include "bequest/common.hpp"
#include "bequest/rootfind.hpp"

namespace bequest {

struct HittingTime {
  double time = 0.0;   // absolute time
  bool capped = false; // truncation horizon reached (T = infinity, w at the safe level)
};

struct StrategyEval {
  double phi = 0.0;    // success probability
  double phi_w = 0.0;  // d phi / d w at fixed t
  double hit_time = 0.0;
  bool hit_exists = true;  // wait strategy: false below the reachability threshold
  bool capped = false;
};

namespace detail {
// Half-open wealth domain checks allow a whisker of quadrature noise at
// the safe level and clamp back onto it.
inline double clamp_to_safe(double w, double wbar, const char* who) {
  domain_check(w >= 0.0, std::string(who) + ": w must be >= 0");
  domain_check(w <= wbar * (1.0 + 1e-9) + 1e-12, std::string(who) + ": w above the safe level");
  return std::min(w, wbar);
}
}  // namespace detail

// Wealth-exhaustion time under full coverage: smallest tf with
// term_apv(t, tf - t) = w.  Residuals are resolved to 1e-10 in wealth
// units.  At the safe level tf = T; for infinite-horizon laws the search
// is capped at the truncation horizon and flagged rather than inventing a
// finite time.
inline HittingTime solve_tf(const ProblemSpec& spec, double w, double t) {
  double wbar = safe_level(spec, t);
  w = detail::clamp_to_safe(w, wbar, "solve_tf");
  if (w == 0.0) return {t, false};
  const double T = horizon(spec.law);
  const double hi = truncation_horizon(spec, t);
  const double m = 1.0 + spec.theta;
  auto f = [&](double tau) { return term_apv(spec, t, tau - t) - w; };
  if (f(hi) <= 0.0) {
    // Indistinguishable from the safe level at working precision.
    if (std::isfinite(T)) return {T, false};
    return {hi, true};
  }
  auto df = [&](double tau) {
    return m * hazard(spec.law, tau) *
           std::exp(-spec.r * (tau - t) - m * cumulative_hazard(spec.law, t, tau));
  };
  RootConfig rc;
  rc.f_tol = 1e-10;
  return {solve_newton(f, df, t, hi, rc), false};
}

// Value and wealth derivative of the full-coverage strategy:
//   phi   = 1 - survival(t, tf)
//   phi_w = e^{r (tf - t) + theta * cumhaz(t, tf)} / (1 + theta).
inline StrategyEval eval_full(const ProblemSpec& spec, double w, double t) {
  HittingTime tf = solve_tf(spec, w, t);
  double lam_int = cumulative_hazard(spec.law, t, tf.time);
  StrategyEval out;
  out.phi = -std::expm1(-lam_int);
  double loading_term = spec.theta > 0.0 ? spec.theta * lam_int : 0.0;  // avoid 0 * inf
  out.phi_w = std::exp(spec.r * (tf.time - t) + loading_term) / (1.0 + spec.theta);
  out.hit_time = tf.time;
  out.hit_exists = true;
  out.capped = tf.capped;
  return out;
}

// Safe-level hitting time under no coverage: smallest t0 with
// w e^{r (t0 - t)} = wbar(t0), i.e. a root of the non-increasing map
// G(tau) = e^{-r (tau - t)} wbar(tau) - w.  Absent when wealth cannot
// reach the safe level (w < e^{-r (T - t)} for finite T; always when
// r = 0 and w < 1), in which case the wait strategy is worthless.
inline std::optional<double> solve_t0(const ProblemSpec& spec, double w, double t) {
  double wbar = safe_level(spec, t);
  domain_check(w >= 0.0, "solve_t0: w must be >= 0");
  domain_check(w <= wbar * (1.0 + 1e-9) + 1e-12, "solve_t0: w above the safe level");
  if (w >= wbar - 1e-12) return t;
  const double T = horizon(spec.law);
  const double hi = std::isfinite(T) ? T - detail::kHorizonPad : truncation_horizon(spec, t);
  auto G = [&](double tau) { return std::exp(-spec.r * (tau - t)) * safe_level(spec, tau) - w; };
  if (G(hi) > 0.0) return std::nullopt;  // never reached (or reached only past working precision)
  auto dG = [&](double tau) {
    return -std::exp(-spec.r * (tau - t)) * premium_rate(spec, tau) *
           (1.0 - safe_level(spec, tau));
  };
  RootConfig rc;
  rc.f_tol = 1e-10;
  return solve_newton(G, dG, t, hi, rc);
}

// Value and wealth derivative of the wait strategy:
//   phi   = survival(t, t0)
//   phi_w = survival(t, t0) e^{r (t0 - t)} / ((1 + theta)(1 - wbar(t0))),
// the cancellation-free form of e^{-cumhaz} / ((1+theta)(e^{-r(t0-t)} - w)).
inline StrategyEval eval_wait(const ProblemSpec& spec, double w, double t) {
  std::optional<double> t0 = solve_t0(spec, w, t);
  StrategyEval out;
  if (!t0) {
    out.hit_exists = false;
    return out;  // phi = 0 below the reachability threshold
  }
  out.hit_time = *t0;
  out.phi = survival(spec.law, t, *t0);
  double denom = (1.0 + spec.theta) * (1.0 - safe_level(spec, *t0));
  out.phi_w = denom > 0.0 ? out.phi * std::exp(spec.r * (*t0 - t)) / denom : kInf;
  return out;
}

// Value of deferring all purchases to time tp and then running the full
// strategy from the grown wealth w e^{r (tp - t)}:
//   survival(t, tp) * phi_full(w e^{r (tp - t)}, tp).
// The grown wealth must not exceed the safe level at tp.
inline double eval_deferred(const ProblemSpec& spec, double w, double t, double tp) {
  domain_check(tp >= t, "eval_deferred: tp must be >= t");
  domain_check(tp < horizon(spec.law), "eval_deferred: tp must be < T");
  double wp = w * std::exp(spec.r * (tp - t));
  double wbar = safe_level(spec, tp);
  wp = detail::clamp_to_safe(wp, wbar, "eval_deferred");
  return survival(spec.law, t, tp) * eval_full(spec, wp, tp).phi;
}

}  // namespace bequest

// Candidate optimal value functions and their verification.
//
// The optimal success probability is known in closed composition for
// three regimes, each guarded by sufficient conditions on the mortality
// law:
//   * WaitUntilSafe: hazard never exceeds the interest rate -> never buy.
//   * FullInsurance: zero interest, or an everywhere-heavy death density
//     (with no loading) -> always buy full coverage.
//   * WaitThenFull: no loading, non-decreasing density, hazard initially
//     below the interest rate -> wait until the hazard catches up at t_r,
//     then buy full coverage.
// Outside these regimes the value is pinned down numerically: a composite
// of the two benchmark strategies glued at the wealth threshold w*(t)
// where their values cross, verified against the variational inequality
//   max{ lambda (phi - 1) - phi_t - ((r+h)w - h) phi_w,
//        lambda phi - phi_t - r w phi_w } = 0
// with the buy/wait side selected by the sign of lambda - h (1-w) phi_w.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "bequest/actuarial.hpp"
#include "bequest/common.hpp"
#include "bequest/rootfind.hpp"
#include "bequest/strategies.hpp"

namespace bequest {

enum class RegimeKind { WaitUntilSafe, FullInsurance, WaitThenFull, Unverified };

struct Regime {
  RegimeKind kind = RegimeKind::Unverified;
  std::optional<double> t_r;  // only for WaitThenFull
};

// First time the hazard rate reaches the interest rate, inf{t : lambda(t) >= r}.
// nullopt means "never" (hazard stays below r throughout).
inline std::optional<double> compute_tr(const ProblemSpec& spec) {
  if (hazard(spec.law, 0.0) >= spec.r) return 0.0;
  if (sup_hazard(spec.law) < spec.r) return std::nullopt;
  const double T = horizon(spec.law);
  double hi = std::isfinite(T) ? T - detail::kHorizonPad : 1.0;
  if (!std::isfinite(T)) {
    while (hazard(spec.law, hi) < spec.r) {
      hi *= 2.0;
      if (hi > 1e12) return std::nullopt;  // sup is a limit never attained
    }
  }
  // Hazards need not be monotone in general, so locate the first grid
  // crossing before refining by bisection.
  const int n = 10000;
  double lo = 0.0;
  for (int k = 1; k <= n; ++k) {
    double tk = hi * k / n;
    if (hazard(spec.law, tk) >= spec.r) {
      hi = tk;
      break;
    }
    lo = tk;
  }
  return bisect_predicate([&](double t) { return hazard(spec.law, t) >= spec.r; }, lo, hi);
}

namespace detail {
// Density check grid: log-spaced to resolve both early times and the far
// tail, plus the endpoints.
inline std::vector<double> density_grid(double hi) {
  const int n = 10000;
  std::vector<double> ts;
  ts.reserve(n + 2);
  ts.push_back(0.0);
  double lo = std::min(1e-6, hi * 1e-9);
  for (int k = 0; k <= n; ++k)
    ts.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / n));
  return ts;
}
}  // namespace detail

// Sufficient-condition classifier.  Grid checks are conservative: a law
// that fails them lands in Unverified, which only costs compute (the
// numeric threshold machinery still applies there).
inline Regime classify(const ProblemSpec& spec) {
  // Never-buy: hazard bounded by the interest rate.
  if (sup_hazard(spec.law) <= spec.r) return {RegimeKind::WaitUntilSafe, std::nullopt};
  // Always-buy, zero interest: holds for every law and loading.
  if (spec.r == 0.0) return {RegimeKind::FullInsurance, std::nullopt};
  const double T = horizon(spec.law);
  if (spec.theta == 0.0 && std::isfinite(T)) {
    // Always-buy: death density at least r everywhere (the binding case of
    // g(s) >= r * survival(0, t) over s >= t >= 0 is t = 0).  An infinite
    // horizon fails automatically since the density must decay to zero.
    bool heavy = true;
    for (double s : detail::density_grid(T - detail::kHorizonPad))
      if (density(spec.law, s) < spec.r) {
        heavy = false;
        break;
      }
    if (heavy) return {RegimeKind::FullInsurance, std::nullopt};
  }
  if (spec.theta == 0.0 && hazard(spec.law, 0.0) < spec.r) {
    // Wait-then-buy: non-decreasing density with hazard starting below r.
    double hi = std::isfinite(T) ? T - detail::kHorizonPad : truncation_horizon(spec, 0.0);
    bool nondecreasing = true;
    double prev = -kInf;
    for (double s : detail::density_grid(hi)) {
      double g = density(spec.law, s);
      if (g < prev - 1e-12) {
        nondecreasing = false;
        break;
      }
      prev = g;
    }
    if (nondecreasing) {
      std::optional<double> tr = compute_tr(spec);
      if (tr) return {RegimeKind::WaitThenFull, tr};
    }
  }
  return {RegimeKind::Unverified, std::nullopt};
}

// Precomputed facts shared by every optimal-value evaluation of one spec.
struct OptimalContext {
  Regime regime;
  double t_r = kNaN;      // WaitThenFull only
  double wbar_tr = kNaN;  // safe level at t_r
};

inline OptimalContext make_optimal_context(const ProblemSpec& spec) {
  OptimalContext ctx;
  ctx.regime = classify(spec);
  if (ctx.regime.kind == RegimeKind::WaitThenFull) {
    ctx.t_r = *ctx.regime.t_r;
    ctx.wbar_tr = safe_level(spec, ctx.t_r);
  }
  return ctx;
}

struct OptimalSample {
  double phi = 0.0;
  double phi_w = 0.0;
  Action action = Action::Wait;
  int branch = 0;  // smoothness class, used for finite-difference stencils
};

// Optimal value and wealth derivative in a verified regime.
inline OptimalSample eval_optimal(const ProblemSpec& spec, const OptimalContext& ctx, double w,
                                  double t) {
  OptimalSample out;
  switch (ctx.regime.kind) {
    case RegimeKind::WaitUntilSafe: {
      StrategyEval e = eval_wait(spec, w, t);
      out = {e.phi, e.phi_w, Action::Wait, e.hit_exists ? 0 : 1};
      return out;
    }
    case RegimeKind::FullInsurance: {
      if (spec.r == 0.0) {
        // Zero interest: phi = 1 - (1-w)^{1/(1+theta)} for every law.
        double m = 1.0 + spec.theta;
        out = {1.0 - std::pow(1.0 - w, 1.0 / m), std::pow(1.0 - w, 1.0 / m - 1.0) / m,
               Action::Buy, 0};
        return out;
      }
      StrategyEval e = eval_full(spec, w, t);
      out = {e.phi, e.phi_w, Action::Buy, 0};
      return out;
    }
    case RegimeKind::WaitThenFull: {
      if (t >= ctx.t_r) {
        StrategyEval e = eval_full(spec, w, t);
        out = {e.phi, e.phi_w, Action::Buy, 2};
        return out;
      }
      double wlow = std::exp(-spec.r * (ctx.t_r - t)) * ctx.wbar_tr;
      if (w < wlow) {
        // Defer everything to t_r, then run the full strategy on the
        // interest-grown wealth.
        double grow = std::exp(spec.r * (ctx.t_r - t));
        StrategyEval e = eval_full(spec, std::min(w * grow, ctx.wbar_tr), ctx.t_r);
        double surv = survival(spec.law, t, ctx.t_r);
        out = {surv * e.phi, surv * grow * e.phi_w, Action::Wait, 0};
        return out;
      }
      StrategyEval e = eval_wait(spec, w, t);
      out = {e.phi, e.phi_w, Action::Wait, 1};
      return out;
    }
    case RegimeKind::Unverified:
      break;
  }
  throw std::domain_error("eval_optimal: regime unverified; use vi_check / find_threshold");
}

// Optimal success probability (verified regimes only).
inline double phi_optimal(const ProblemSpec& spec, double w, double t) {
  return eval_optimal(spec, make_optimal_context(spec), w, t).phi;
}

// ---------------------------------------------------------------------------
// Candidate lattices and the variational-inequality verifier.
// ---------------------------------------------------------------------------

// A candidate value function tabulated on a rectangle of (time, wealth
// fraction) nodes, wealth at node (i, j) being fractions[j] * safe[i].
// `action` selects which side of the variational inequality each node
// claims; `branch` groups nodes into smoothness classes so the verifier
// never differences across a known kink (regime boundaries, thresholds).
struct CandidateLattice {
  std::vector<double> times;      // strictly increasing, >= 3 entries
  std::vector<double> fractions;  // increasing within [0, 1], >= 3 entries
  std::vector<double> safe;       // safe level at each time
  std::vector<double> safe_slope; // its time derivative
  std::vector<std::vector<double>> phi;     // [time][fraction]
  std::vector<std::vector<double>> phi_w;
  std::vector<std::vector<Action>> action;
  std::vector<std::vector<int>> branch;
};

struct VIOptions {
  double pde_tol = 1e-3;     // finite differences dominate the residual
  double sign_slack = 1e-8;  // analytic sign condition, noise only
};

struct VIPoint {
  double w = 0.0;
  double t = 0.0;
  double residual = kNaN;  // PDE residual (NaN when no time stencil exists)
  Action action = Action::Wait;
  bool pde_violation = false;
  bool sign_violation = false;
};

struct VIReport {
  VIOptions tol;
  double pde_residual_max = 0.0;
  std::vector<VIPoint> points;      // every checked node
  std::vector<VIPoint> violations;  // subset that failed either condition
  int skipped = 0;                  // nodes with no usable derivative data
  bool pass = false;
};

namespace detail {
// Derivative at x0 of the quadratic interpolant through three points.
inline double quad3_deriv(double x0, double xa, double fa, double xb, double fb, double xc,
                          double fc) {
  return fa * (2.0 * x0 - xb - xc) / ((xa - xb) * (xa - xc)) +
         fb * (2.0 * x0 - xa - xc) / ((xb - xa) * (xb - xc)) +
         fc * (2.0 * x0 - xa - xb) / ((xc - xa) * (xc - xb));
}
}  // namespace detail

// Checks a candidate against the variational inequality.  phi_w comes
// from the lattice (analytic where the builder knew it; NaNs fall back to
// same-branch differences in w); phi_t is differenced in time along fixed
// fractions, using one-sided stencils rather than straddling a branch
// boundary.  Sign conditions are exact up to `sign_slack`; PDE residuals
// carry the truncation error of the stencil and compare against `pde_tol`.
inline VIReport vi_check(const ProblemSpec& spec, const CandidateLattice& cand,
                         VIOptions opts = {}) {
  const std::size_t nt = cand.times.size(), nf = cand.fractions.size();
  domain_check(nt >= 3 && nf >= 3, "vi_check: need at least 3 points per axis");
  VIReport rep;
  rep.tol = opts;
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = cand.times[i];
    const double lam = hazard(spec.law, t);
    const double h = premium_rate(spec, t);
    for (std::size_t j = 0; j < nf; ++j) {
      const double f = cand.fractions[j];
      if (f <= 0.0 || f >= 1.0) continue;  // boundary columns anchor stencils only
      const int b = cand.branch[i][j];
      const double w = f * cand.safe[i];
      VIPoint pt;
      pt.w = w;
      pt.t = t;
      pt.action = cand.action[i][j];

      double phi_w = cand.phi_w[i][j];
      if (std::isnan(phi_w) && j > 0 && j + 1 < nf) {
        // Fallback: difference across same-branch wealth neighbours.
        auto ok = [&](std::size_t k) { return cand.branch[i][k] == b; };
        double wl = cand.fractions[j - 1] * cand.safe[i];
        double wr = cand.fractions[j + 1] * cand.safe[i];
        if (ok(j - 1) && ok(j + 1))
          phi_w = (cand.phi[i][j + 1] - cand.phi[i][j - 1]) / (wr - wl);
        else if (ok(j + 1))
          phi_w = (cand.phi[i][j + 1] - cand.phi[i][j]) / (wr - w);
        else if (ok(j - 1))
          phi_w = (cand.phi[i][j] - cand.phi[i][j - 1]) / (w - wl);
      }
      if (std::isnan(phi_w)) {
        ++rep.skipped;
        continue;
      }

      // Sign condition: lambda - h (1 - w) phi_w, >= 0 where buying is
      // claimed optimal, <= 0 where waiting is.  Checked in the
      // hazard-normalized form 1 - (1 + theta)(1 - w) phi_w, which has the
      // same sign wherever lambda > 0 and remains meaningful (as the
      // lambda -> 0 limit) at instants where the hazard vanishes.
      double sign_expr = 1.0 - (1.0 + spec.theta) * (1.0 - w) * phi_w;
      pt.sign_violation = pt.action == Action::Buy ? sign_expr < -opts.sign_slack
                                                   : sign_expr > opts.sign_slack;

      // Nodes ride the curve w = f * safe(t), so convert the lattice time
      // derivative to one at fixed wealth via the safe-level slope.
      auto same = [&](std::size_t k) { return cand.branch[k][j] == b; };
      auto psi = [&](std::size_t k) { return cand.phi[k][j]; };
      const auto& ts = cand.times;
      double dpsi = kNaN;
      if (i > 0 && i + 1 < nt && same(i - 1) && same(i + 1))
        dpsi = detail::quad3_deriv(t, ts[i - 1], psi(i - 1), t, psi(i), ts[i + 1], psi(i + 1));
      else if (i + 2 < nt && same(i + 1) && same(i + 2))
        dpsi = detail::quad3_deriv(t, t, psi(i), ts[i + 1], psi(i + 1), ts[i + 2], psi(i + 2));
      else if (i >= 2 && same(i - 1) && same(i - 2))
        dpsi = detail::quad3_deriv(t, ts[i - 2], psi(i - 2), ts[i - 1], psi(i - 1), t, psi(i));
      else if (i + 1 < nt && same(i + 1))
        dpsi = (psi(i + 1) - psi(i)) / (ts[i + 1] - t);
      else if (i > 0 && same(i - 1))
        dpsi = (psi(i) - psi(i - 1)) / (t - ts[i - 1]);

      if (!std::isnan(dpsi)) {
        double phi_t = dpsi - phi_w * f * cand.safe_slope[i];
        double phi = cand.phi[i][j];
        pt.residual = pt.action == Action::Buy
                          ? lam * (phi - 1.0) - phi_t - ((spec.r + h) * w - h) * phi_w
                          : lam * phi - phi_t - spec.r * w * phi_w;
        rep.pde_residual_max = std::max(rep.pde_residual_max, std::abs(pt.residual));
        pt.pde_violation = std::abs(pt.residual) >= opts.pde_tol;
      }

      rep.points.push_back(pt);
      if (pt.pde_violation || pt.sign_violation) rep.violations.push_back(pt);
    }
  }
  bool sign_ok = std::none_of(rep.violations.begin(), rep.violations.end(),
                              [](const VIPoint& p) { return p.sign_violation; });
  rep.pass = rep.pde_residual_max < opts.pde_tol && sign_ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Lattice builders.
// ---------------------------------------------------------------------------

namespace detail {
inline CandidateLattice lattice_shell(const ProblemSpec& spec, std::vector<double> times,
                                      std::vector<double> fractions) {
  domain_check(times.size() >= 3 && fractions.size() >= 3,
               "lattice: need at least 3 points per axis");
  CandidateLattice c;
  c.times = std::move(times);
  c.fractions = std::move(fractions);
  c.safe.reserve(c.times.size());
  c.safe_slope.reserve(c.times.size());
  for (double t : c.times) {
    c.safe.push_back(safe_level(spec, t));
    c.safe_slope.push_back(safe_level_derivative(spec, t));
  }
  std::size_t nt = c.times.size(), nf = c.fractions.size();
  c.phi.assign(nt, std::vector<double>(nf, 0.0));
  c.phi_w.assign(nt, std::vector<double>(nf, 0.0));
  c.action.assign(nt, std::vector<Action>(nf, Action::Wait));
  c.branch.assign(nt, std::vector<int>(nf, 0));
  return c;
}
}  // namespace detail

// Full-coverage strategy as an all-buy candidate.
inline CandidateLattice make_full_lattice(const ProblemSpec& spec, std::vector<double> times,
                                          std::vector<double> fractions) {
  CandidateLattice c = detail::lattice_shell(spec, std::move(times), std::move(fractions));
  for (std::size_t i = 0; i < c.times.size(); ++i)
    for (std::size_t j = 0; j < c.fractions.size(); ++j) {
      StrategyEval e = eval_full(spec, c.fractions[j] * c.safe[i], c.times[i]);
      c.phi[i][j] = e.phi;
      c.phi_w[i][j] = e.phi_w;
      c.action[i][j] = Action::Buy;
    }
  return c;
}

// Wait strategy as an all-wait candidate; the unreachable region (value
// identically zero) gets its own smoothness branch.
inline CandidateLattice make_wait_lattice(const ProblemSpec& spec, std::vector<double> times,
                                          std::vector<double> fractions) {
  CandidateLattice c = detail::lattice_shell(spec, std::move(times), std::move(fractions));
  for (std::size_t i = 0; i < c.times.size(); ++i)
    for (std::size_t j = 0; j < c.fractions.size(); ++j) {
      StrategyEval e = eval_wait(spec, c.fractions[j] * c.safe[i], c.times[i]);
      c.phi[i][j] = e.phi;
      c.phi_w[i][j] = e.phi_w;
      c.branch[i][j] = e.hit_exists ? 0 : 1;
    }
  return c;
}

// Verified-regime optimal value as a candidate with its own actions.
inline CandidateLattice make_optimal_lattice(const ProblemSpec& spec, std::vector<double> times,
                                             std::vector<double> fractions) {
  OptimalContext ctx = make_optimal_context(spec);
  CandidateLattice c = detail::lattice_shell(spec, std::move(times), std::move(fractions));
  for (std::size_t i = 0; i < c.times.size(); ++i)
    for (std::size_t j = 0; j < c.fractions.size(); ++j) {
      OptimalSample s = eval_optimal(spec, ctx, c.fractions[j] * c.safe[i], c.times[i]);
      c.phi[i][j] = s.phi;
      c.phi_w[i][j] = s.phi_w;
      c.action[i][j] = s.action;
      c.branch[i][j] = s.branch;
    }
  return c;
}

// Composite max(full, wait) candidate: buy wherever the full-coverage
// value is at least the wait value, wait elsewhere.
inline CandidateLattice make_threshold_lattice(const ProblemSpec& spec, std::vector<double> times,
                                               std::vector<double> fractions) {
  CandidateLattice c = detail::lattice_shell(spec, std::move(times), std::move(fractions));
  for (std::size_t i = 0; i < c.times.size(); ++i)
    for (std::size_t j = 0; j < c.fractions.size(); ++j) {
      double w = c.fractions[j] * c.safe[i];
      StrategyEval ef = eval_full(spec, w, c.times[i]);
      StrategyEval e0 = eval_wait(spec, w, c.times[i]);
      bool buy = ef.phi >= e0.phi;
      c.phi[i][j] = buy ? ef.phi : e0.phi;
      c.phi_w[i][j] = buy ? ef.phi_w : e0.phi_w;
      c.action[i][j] = buy ? Action::Buy : Action::Wait;
      c.branch[i][j] = buy ? 0 : 1;
    }
  return c;
}

// ---------------------------------------------------------------------------
// Threshold curve w*(t).
// ---------------------------------------------------------------------------

struct ThresholdResult {
  bool crossing = false;  // a unique full/wait value crossing exists in (0, safe)
  double wstar = kNaN;    // wealth level of the crossing
  bool valid = false;     // composite passes the VI check in a window around t
};

struct ThresholdOptions {
  double window = 0.5;     // half-spacing of the 5-column VI window
  int scan_points = 64;    // crossing scan resolution in wealth
  int vi_fractions = 48;   // VI window resolution in wealth
  VIOptions vi{};
};

namespace detail {
// Unique sign change of phi_full - phi_wait on the interior wealth grid.
// Multiple changes abort: the construction gives no rule for picking one.
inline std::optional<double> scan_crossing(const ProblemSpec& spec, double t, double wbar,
                                           int points) {
  auto diff = [&](double w) { return eval_full(spec, w, t).phi - eval_wait(spec, w, t).phi; };
  double prev_w = wbar / points;
  double prev_d = diff(prev_w);
  std::optional<std::pair<double, double>> bracket;
  for (int k = 2; k < points; ++k) {
    double w = wbar * k / points;
    double d = diff(w);
    if (opposite_signs(prev_d, d) || d == 0.0) {
      if (bracket)
        throw numerical_error("find_threshold: multiple value crossings at t = " +
                              std::to_string(t));
      bracket = {prev_w, w};
    }
    prev_w = w;
    prev_d = d;
  }
  if (!bracket) return std::nullopt;
  RootConfig rc;
  rc.f_tol = 1e-12;
  return solve_bracketed(diff, bracket->first, bracket->second, rc);
}
}  // namespace detail

// Wealth threshold where the full and wait values cross, plus a validity
// verdict: the composite candidate must pass the variational inequality
// on a five-column time window centred (where possible) at t, judged on
// the centre column alone.
inline ThresholdResult find_threshold(const ProblemSpec& spec, double t,
                                      ThresholdOptions opts = {}) {
  domain_check(t >= 0.0 && t < horizon(spec.law), "find_threshold: t outside [0, T)");
  ThresholdResult res;
  double wbar = safe_level(spec, t);
  std::optional<double> w = detail::scan_crossing(spec, t, wbar, opts.scan_points);
  if (!w) return res;
  res.crossing = true;
  res.wstar = *w;

  double d = opts.window;
  const double T = horizon(spec.law);
  if (std::isfinite(T)) d = std::min(d, (T - detail::kHorizonPad) / 8.0);
  double start = std::max(0.0, t - 2.0 * d);
  if (std::isfinite(T)) start = std::max(0.0, std::min(start, T - detail::kHorizonPad - 4.0 * d));
  std::vector<double> times(5);
  for (int k = 0; k < 5; ++k) times[k] = start + k * d;
  std::vector<double> fractions(opts.vi_fractions);
  for (int k = 0; k < opts.vi_fractions; ++k)
    fractions[k] = (k + 1.0) / (opts.vi_fractions + 1.0);
  CandidateLattice cand = make_threshold_lattice(spec, times, fractions);
  VIReport rep = vi_check(spec, cand, opts.vi);

  // Judge only the centre column: the flanking columns exist to give it
  // second-order stencils.
  double tc = times[2];
  for (double col : times)
    if (std::abs(col - t) < std::abs(tc - t)) tc = col;
  res.valid = true;
  for (const VIPoint& p : rep.points)
    if (std::abs(p.t - tc) < 0.5 * d &&
        (p.sign_violation || (!std::isnan(p.residual) && std::abs(p.residual) >= opts.vi.pde_tol)))
      res.valid = false;
  return res;
}

struct ThresholdCurve {
  std::vector<double> times;
  std::vector<double> wstar;  // NaN where no crossing exists
  std::vector<bool> valid;
  double valid_from = kInf;  // earliest time with a valid crossing
};

inline ThresholdCurve build_threshold_curve(const ProblemSpec& spec,
                                            const std::vector<double>& times,
                                            ThresholdOptions opts = {}) {
  ThresholdCurve curve;
  curve.times = times;
  for (double t : times) {
    ThresholdResult r = find_threshold(spec, t, opts);
    curve.wstar.push_back(r.crossing ? r.wstar : kNaN);
    curve.valid.push_back(r.valid);
    if (r.valid && t < curve.valid_from) curve.valid_from = t;
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Endpoint slopes of the two strategies, for ordering arguments near the
// wealth boundary.
// ---------------------------------------------------------------------------

struct BoundarySlopes {
  double full_at_zero = 0.0;  // 1 / (1 + theta)
  double full_at_safe = 0.0;  // exp(r (T - t)) when T finite and theta = 0, else +inf
  double wait_at_zero = 0.0;  // identically zero
  double wait_at_safe = 0.0;  // 1 / ((1 + theta)(1 - safe_level(t)))
};

inline BoundarySlopes boundary_slopes(const ProblemSpec& spec, double t) {
  BoundarySlopes s;
  s.full_at_zero = 1.0 / (1.0 + spec.theta);
  const double T = horizon(spec.law);
  s.full_at_safe =
      (std::isfinite(T) && spec.theta == 0.0) ? std::exp(spec.r * (T - t)) : kInf;
  s.wait_at_zero = 0.0;
  double wbar = safe_level(spec, t);
  s.wait_at_safe = wbar < 1.0 ? 1.0 / ((1.0 + spec.theta) * (1.0 - wbar)) : kInf;
  return s;
}

}  // namespace bequest

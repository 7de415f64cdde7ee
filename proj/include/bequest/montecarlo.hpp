// Monte Carlo cross-validation of the analytic values.  A path draws a
// death time conditioned on survival to the start age; wealth between
// policy events follows the deterministic ODE W' = rW - h(t)D(t), so each
// (spec, policy, start state) reduces to a fixed timeline of covered /
// uncovered intervals judged against the sampled death time.  There is no
// time stepping: hitting times come from the same root machinery as the
// analytic evaluators, so the only error left is statistical.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "bequest/common.hpp"
#include "bequest/optimal.hpp"
#include "bequest/rootfind.hpp"
#include "bequest/strategies.hpp"

namespace bequest {

// Purchase policies.  Each defines coverage D(t) in {0, 1 - W(t)} from the
// current state only, never from the death time.
struct FullUntilRuin {};            // buy 1 - W until wealth exhausts
struct WaitUntilSafe {};            // buy nothing until the safe level
struct Deferred {                   // wait until t_prime, then full coverage
  double t_prime = 0.0;
};
struct Threshold {                  // full coverage below w*(t), wait above
  ThresholdCurve curve;
};
using Policy = std::variant<FullUntilRuin, WaitUntilSafe, Deferred, Threshold>;

struct SimResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t n_paths = 0;
  std::uint64_t seed = 0;
};

// Counter-based uniform draw in (0, 1]: a pure function of (seed, index),
// so paths can run in any order on any number of threads and still see
// the same stream.
namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

inline double path_uniform(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = detail::splitmix64(seed ^ detail::splitmix64(index));
  return ((z >> 11) + 1) * 0x1.0p-53;
}

// Death time for one path, conditioned on survival to t.
inline double draw_death(const MortalityLaw& law, double t, std::uint64_t seed,
                         std::uint64_t index) {
  return inverse_cumulative_hazard(law, t, -std::log(path_uniform(seed, index)));
}

// One maximal interval on which coverage is constant.  On covered
// intervals W + D = 1 identically; on uncovered ones wealth grows from
// w_from at the risk-free rate.
struct WealthSegment {
  double from = 0.0;
  double to = 0.0;
  bool covered = false;
  double w_from = 0.0;
};

struct Timeline {
  std::vector<WealthSegment> segments;  // contiguous, starting at the start age
  bool success_after_end = false;       // outcome for deaths past the last segment
  double r = 0.0;
};

// Success of one path: died inside a covered interval (estate tops up to
// exactly 1), or while uncovered with wealth already at the bequest
// target (possible only where the safe level crowds 1), or past the end
// of an absorbing-success timeline.
inline bool timeline_success(const Timeline& tl, double tau) {
  for (const WealthSegment& seg : tl.segments)
    if (tau < seg.to) {
      if (seg.covered) return true;
      return seg.w_from * std::exp(tl.r * (tau - seg.from)) >= 1.0 - 1e-12;
    }
  return tl.success_after_end;
}

namespace detail {
// Coverage until wealth exhausts; deaths past a horizon-capped hitting
// time count as success (the full strategy at the safe level is safe).
inline void append_full_phase(Timeline& tl, const ProblemSpec& spec, double w, double t) {
  HittingTime tf = solve_tf(spec, w, t);
  tl.segments.push_back({t, tf.time, true, w});
  tl.success_after_end =
      tf.capped || tf.time >= horizon(spec.law) - detail::kHorizonPad;
}

inline double interp_wstar(const ThresholdCurve& c, double t) {
  domain_check(c.times.size() >= 2, "threshold policy: curve needs at least two points");
  domain_check(t >= c.times.front() - 1e-9 && t <= c.times.back() + 1e-9,
               "threshold policy: curve does not cover t = " + std::to_string(t));
  auto up = std::upper_bound(c.times.begin(), c.times.end(), t);
  std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(up - c.times.begin(), 1),
                                         c.times.size() - 1);
  double t0 = c.times[hi - 1], t1 = c.times[hi];
  double w0 = c.wstar[hi - 1], w1 = c.wstar[hi];
  domain_check(!std::isnan(w0) && !std::isnan(w1),
               "threshold policy: curve has no crossing near t = " + std::to_string(t));
  double a = (t - t0) / (t1 - t0);
  return w0 + a * (w1 - w0);
}
}  // namespace detail

// Deterministic wealth timeline for a policy started at (w, t).
inline Timeline make_timeline(const ProblemSpec& spec, const Policy& policy, double w, double t) {
  domain_check(t >= 0.0 && t < horizon(spec.law), "make_timeline: t outside [0, T)");
  Timeline tl;
  tl.r = spec.r;

  if (std::holds_alternative<FullUntilRuin>(policy)) {
    detail::append_full_phase(tl, spec, w, t);
    return tl;
  }

  if (std::holds_alternative<WaitUntilSafe>(policy)) {
    std::optional<double> t0 = solve_t0(spec, w, t);
    if (!t0) {
      tl.segments.push_back({t, kInf, false, w});  // never reaches the safe level
      return tl;
    }
    tl.segments.push_back({t, *t0, false, w});
    tl.segments.push_back({*t0, kInf, true, safe_level(spec, *t0)});
    tl.success_after_end = true;
    return tl;
  }

  if (const Deferred* d = std::get_if<Deferred>(&policy)) {
    domain_check(d->t_prime >= t, "deferred policy: t_prime before start age");
    domain_check(d->t_prime < horizon(spec.law), "deferred policy: t_prime past the horizon");
    tl.segments.push_back({t, d->t_prime, false, w});
    double wp = w * std::exp(spec.r * (d->t_prime - t));
    wp = detail::clamp_to_safe(wp, safe_level(spec, d->t_prime), "deferred policy");
    detail::append_full_phase(tl, spec, wp, d->t_prime);
    return tl;
  }

  const Threshold& th = std::get<Threshold>(policy);
  if (w <= detail::interp_wstar(th.curve, t)) {
    detail::append_full_phase(tl, spec, w, t);
    return tl;
  }
  // Wait phase: wealth grows at r while above the threshold curve; it
  // either reaches the safe level (absorbing success) or sinks below the
  // rising curve, at which point the policy switches to full coverage.
  std::optional<double> t0 = solve_t0(spec, w, t);
  double limit = t0 ? *t0 : kInf;
  auto excess = [&](double s) {
    return w * std::exp(spec.r * (s - t)) - detail::interp_wstar(th.curve, s);
  };
  double cross = kNaN;
  double prev = t;
  for (double node : th.curve.times) {
    if (node <= t) continue;
    double s = std::min(node, limit);
    if (excess(s) <= 0.0) {
      RootConfig rc;
      rc.f_tol = 1e-12;
      cross = solve_bracketed(excess, prev, s, rc);
      break;
    }
    prev = s;
    if (node >= limit) break;
  }
  if (!std::isnan(cross)) {
    tl.segments.push_back({t, cross, false, w});
    double wc = w * std::exp(spec.r * (cross - t));
    detail::append_full_phase(tl, spec, std::min(wc, safe_level(spec, cross)), cross);
    return tl;
  }
  domain_check(t0.has_value() && *t0 <= th.curve.times.back() + 1e-9,
               "threshold policy: curve does not cover the wait phase");
  tl.segments.push_back({t, *t0, false, w});
  tl.segments.push_back({*t0, kInf, true, safe_level(spec, *t0)});
  tl.success_after_end = true;
  return tl;
}

// Success probability estimate over n independent paths.  The reduction
// is an integer count, so the estimate is identical for any thread count
// (threads come from BEQUEST_THREADS, default 1 per hardware thread).
inline SimResult simulate(const ProblemSpec& spec, const Policy& policy, double w, double t,
                          std::int64_t n, std::uint64_t seed) {
  domain_check(n >= 1, "simulate: need at least one path");
  Timeline tl = make_timeline(spec, policy, w, t);

  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BEQUEST_THREADS")) {
    long v = std::atol(env);
    if (v >= 1 && v <= 256) threads = static_cast<unsigned>(v);
  }
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, n));

  std::vector<std::int64_t> counts(threads, 0);
  auto worker = [&](unsigned id) {
    std::int64_t lo = n * id / threads, hi = n * (id + 1) / threads;
    std::int64_t c = 0;
    for (std::int64_t j = lo; j < hi; ++j)
      c += timeline_success(tl, draw_death(spec.law, t, seed, static_cast<std::uint64_t>(j)));
    counts[id] = c;
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(worker, id);
    for (std::thread& th : pool) th.join();
  }
  std::int64_t successes = 0;
  for (std::int64_t c : counts) successes += c;

  SimResult res;
  res.estimate = static_cast<double>(successes) / static_cast<double>(n);
  res.std_error = std::sqrt(res.estimate * (1.0 - res.estimate) / static_cast<double>(n));
  res.n_paths = n;
  res.seed = seed;
  return res;
}

}  // namespace bequest

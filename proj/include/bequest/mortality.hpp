// Mortality laws: force of mortality (hazard), survival, density, and
// death-time sampling for a small family of analytic laws plus tabulated
// data.  Every law exposes a closed-form cumulative hazard, so survival
// probabilities never require quadrature.
//
// Conventions shared by all laws:
//   * time is measured from the valuation age (t = 0), horizon T may be
//     +infinity;
//   * the hazard is non-negative and non-decreasing (validated at
//     construction, including tabulated input);
//   * T is an open endpoint: pointwise hazard/density evaluation requires
//     t < T, and evaluation is capped at T - 1e-9 where the hazard blows
//     up;  survival(t, T) = 0 is honoured in the limiting sense.
#pragma once

#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bequest/common.hpp"
#include "bequest/rootfind.hpp"

namespace bequest {

namespace detail {
// Hazard evaluation near a finite horizon is clamped this far below T.
inline constexpr double kHorizonPad = 1e-9;
}  // namespace detail

// ---------------------------------------------------------------------------
// Law types

// Constant hazard mu; exponential lifetime.
struct ConstantForce {
  double mu;
  explicit ConstantForce(double mu_) : mu(mu_) { domain_check(mu > 0.0, "ConstantForce: mu must be > 0"); }
  double horizon() const { return kInf; }
  double hazard(double) const { return mu; }
  double cum_hazard(double t, double s) const { return mu * (s - t); }
  double hazard_sup() const { return mu; }
};

// Uniform death time on [0, T]; hazard 1/(T - t).
struct DeMoivre {
  double T;
  explicit DeMoivre(double T_) : T(T_) { domain_check(T > 0.0, "DeMoivre: T must be > 0"); }
  double horizon() const { return T; }
  double hazard(double t) const { return 1.0 / (T - std::min(t, T - detail::kHorizonPad)); }
  double cum_hazard(double t, double s) const { return std::log((T - t) / (T - s)); }
  double hazard_sup() const { return kInf; }
};

// Gamma(2, mu) lifetime: density mu^2 t e^{-mu t}, hazard mu^2 t/(mu t + 1),
// increasing from 0 toward mu.
struct GammaTwo {
  double mu;
  explicit GammaTwo(double mu_) : mu(mu_) { domain_check(mu > 0.0, "GammaTwo: mu must be > 0"); }
  double horizon() const { return kInf; }
  double hazard(double t) const { return mu * mu * t / (mu * t + 1.0); }
  double cum_hazard(double t, double s) const {
    return mu * (s - t) - std::log((1.0 + mu * s) / (1.0 + mu * t));
  }
  double hazard_sup() const { return mu; }
};

// Lifetime density linear in t: g(t) = r - 2(rT - 1) t / T^2 on [0, T],
// parameterised so that g(0) equals the force of interest it is paired
// with.  Requires r*T > 1 (the density must be decreasing); the constructor
// additionally verifies on a fine grid that g stays non-negative and that
// the implied hazard is non-decreasing.
struct LinearPdf {
  double r, T;
  LinearPdf(double r_, double T_) : r(r_), T(T_) {
    domain_check(r > 0.0 && T > 0.0, "LinearPdf: r and T must be > 0");
    domain_check(r * T > 1.0, "LinearPdf: requires r*T > 1");
    const int n = 1000;
    double prev = hazard(0.0);
    for (int i = 0; i <= n; ++i) {
      double t = (T - detail::kHorizonPad) * i / n;
      domain_check(density_raw(t) >= -1e-12, "LinearPdf: density goes negative (r*T too large)");
      double h = hazard(t);
      domain_check(h >= prev - 1e-10 * (1.0 + prev), "LinearPdf: hazard not non-decreasing");
      prev = h;
    }
  }
  double horizon() const { return T; }
  double density_raw(double t) const { return r - 2.0 * (r * T - 1.0) * t / (T * T); }
  double survival_raw(double t) const {  // 1 - integral of the density
    double u = t / T;
    return std::max(0.0, 1.0 - r * t + (r * T - 1.0) * u * u);
  }
  double hazard(double t) const {
    double tc = std::min(t, T - detail::kHorizonPad);
    return density_raw(tc) / survival_raw(tc);
  }
  double cum_hazard(double t, double s) const { return std::log(survival_raw(t) / survival_raw(s)); }
  double hazard_sup() const { return kInf; }
};

// Hazard given at knot times, interpolated between them.
enum class Interp { Step, Linear };
// Behaviour past the final knot: constant hazard at the last value
// (horizon stays infinite), or a finite horizon at the last knot where the
// hazard is completed hyperbolically, c/(T - s), so that survival reaches
// zero exactly at T.  In the finite-horizon mode the final row only marks
// T; its rate value is ignored.
enum class Tail { ConstantRate, FiniteHorizon };

class Tabulated {
 public:
  Tabulated(std::vector<double> knots, std::vector<double> rates, Interp interp, Tail tail)
      : t_(std::move(knots)), lam_(std::move(rates)), interp_(interp), tail_(tail) {
    domain_check(t_.size() == lam_.size() && t_.size() >= 2, "Tabulated: need >= 2 rows of equal length");
    domain_check(t_.front() == 0.0, "Tabulated: first knot must be t = 0");
    for (std::size_t i = 0; i + 1 < t_.size(); ++i)
      domain_check(t_[i + 1] > t_[i], "Tabulated: knot times must be strictly increasing");
    std::size_t rated = (tail_ == Tail::FiniteHorizon) ? t_.size() - 1 : t_.size();
    for (std::size_t i = 0; i < rated; ++i) {
      domain_check(lam_[i] >= 0.0, "Tabulated: rates must be >= 0");
      if (i) domain_check(lam_[i] >= lam_[i - 1], "Tabulated: rates must be non-decreasing");
    }
    if (tail_ == Tail::ConstantRate)
      domain_check(lam_.back() > 0.0, "Tabulated: constant-rate tail needs a positive final rate");
    else
      domain_check(lam_[t_.size() - 2] > 0.0, "Tabulated: finite-horizon tail needs a positive anchor rate");
    T_ = (tail_ == Tail::FiniteHorizon) ? t_.back() : kInf;
    if (tail_ == Tail::FiniteHorizon) hyp_c_ = lam_[t_.size() - 2] * (T_ - t_[t_.size() - 2]);
    // Cumulative hazard at each knot; the hyperbolic final segment diverges
    // and is handled separately.
    H_.assign(t_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
      if (tail_ == Tail::FiniteHorizon && i + 2 == t_.size()) break;
      double dt = t_[i + 1] - t_[i];
      H_[i + 1] = H_[i] + (interp_ == Interp::Step ? lam_[i] * dt
                                                   : 0.5 * (lam_[i] + lam_[i + 1]) * dt);
    }
  }

  double horizon() const { return T_; }
  double hazard_sup() const { return tail_ == Tail::ConstantRate ? lam_.back() : kInf; }

  double hazard(double t) const {
    t = std::min(t, T_ - detail::kHorizonPad);
    std::size_t i = segment(t);
    if (in_hyperbolic(i)) return hyp_c_ / (T_ - t);
    if (i + 1 >= t_.size()) return lam_.back();  // constant-rate tail
    if (interp_ == Interp::Step) return lam_[i];
    double a = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return lam_[i] + a * (lam_[i + 1] - lam_[i]);
  }

  double cum_hazard(double t, double s) const { return prefix(s) - prefix(t); }

  const std::vector<double>& knots() const { return t_; }

 private:
  std::size_t segment(double t) const {  // index i with t in [t_i, t_{i+1})
    std::size_t i = 0;
    while (i + 1 < t_.size() && t >= t_[i + 1]) ++i;
    return i;
  }
  bool in_hyperbolic(std::size_t i) const {
    return tail_ == Tail::FiniteHorizon && i + 2 >= t_.size();
  }
  double prefix(double t) const {  // cumulative hazard from 0 to t
    if (t >= T_) return kInf;
    std::size_t i = segment(t);
    if (in_hyperbolic(i)) {
      std::size_t a = t_.size() - 2;
      return H_[a] + hyp_c_ * std::log((T_ - t_[a]) / (T_ - t));
    }
    if (i + 1 >= t_.size()) return H_.back() + lam_.back() * (t - t_.back());
    double dt = t - t_[i];
    if (interp_ == Interp::Step) return H_[i] + lam_[i] * dt;
    double slope = (lam_[i + 1] - lam_[i]) / (t_[i + 1] - t_[i]);
    return H_[i] + lam_[i] * dt + 0.5 * slope * dt * dt;
  }

  std::vector<double> t_, lam_, H_;
  Interp interp_;
  Tail tail_;
  double T_ = kInf, hyp_c_ = 0.0;
};

using MortalityLaw = std::variant<ConstantForce, DeMoivre, GammaTwo, LinearPdf, Tabulated>;

// ---------------------------------------------------------------------------
// Law operations

inline double horizon(const MortalityLaw& law) {
  return std::visit([](const auto& l) { return l.horizon(); }, law);
}

// Least upper bound of the hazard over [0, T); +inf for laws whose hazard
// diverges at a finite horizon.
inline double sup_hazard(const MortalityLaw& law) {
  return std::visit([](const auto& l) { return l.hazard_sup(); }, law);
}

inline double hazard(const MortalityLaw& law, double t) {
  domain_check(t >= 0.0, "hazard: t must be >= 0");
  domain_check(t < horizon(law), "hazard: t must be < T");
  return std::visit([&](const auto& l) { return l.hazard(t); }, law);
}

// Integral of the hazard over [t, s]; +inf when s = T < infinity.
inline double cumulative_hazard(const MortalityLaw& law, double t, double s) {
  domain_check(t >= 0.0 && s >= t, "cumulative_hazard: need 0 <= t <= s");
  domain_check(s <= horizon(law), "cumulative_hazard: s must be <= T");
  return std::visit([&](const auto& l) { return l.cum_hazard(t, s); }, law);
}

// P(alive at s | alive at t); survival(t, t) = 1, survival(t, T) = 0.
inline double survival(const MortalityLaw& law, double t, double s) {
  return std::exp(-cumulative_hazard(law, t, s));
}

// Unconditional lifetime density g(t) = hazard(t) * survival(0, t).
inline double density(const MortalityLaw& law, double t) {
  return hazard(law, t) * survival(law, 0.0, t);
}

// Smallest s >= t with cumulative_hazard(t, s) = target (target >= 0).
// Closed forms where available, monotone bisection otherwise.
inline double inverse_cumulative_hazard(const MortalityLaw& law, double t, double target) {
  domain_check(target >= 0.0, "inverse_cumulative_hazard: target must be >= 0");
  domain_check(t >= 0.0 && t < horizon(law), "inverse_cumulative_hazard: t must be in [0, T)");
  if (target == 0.0) return t;
  if (const auto* c = std::get_if<ConstantForce>(&law)) return t + target / c->mu;
  if (const auto* d = std::get_if<DeMoivre>(&law)) return d->T - (d->T - t) * std::exp(-target);
  const double T = horizon(law);
  auto reached = [&](double s) { return cumulative_hazard(law, t, s) >= target; };
  double hi;
  if (std::isfinite(T)) {
    hi = T;
  } else {
    hi = t + 1.0;
    while (!reached(hi)) hi = t + 2.0 * (hi - t);
  }
  return bisect_predicate(reached, t, hi, 1e-13);
}

// Death time with survival(0, tau) = u, for u in (0, 1].  Deterministic;
// the Monte Carlo driver feeds it uniform draws.
inline double sample_death_time(const MortalityLaw& law, double u) {
  domain_check(u > 0.0 && u <= 1.0, "sample_death_time: u must be in (0, 1]");
  return inverse_cumulative_hazard(law, 0.0, -std::log(u));
}

// Ascending subdivision points for integrating a hazard-driven integrand
// over [a, b]: the endpoints plus any tabulated knots strictly inside.
inline std::vector<double> hazard_breakpoints(const MortalityLaw& law, double a, double b) {
  std::vector<double> pts{a};
  if (const auto* tab = std::get_if<Tabulated>(&law))
    for (double k : tab->knots())
      if (k > a && k < b) pts.push_back(k);
  pts.push_back(b);
  return pts;
}

// ---------------------------------------------------------------------------
// CSV loader: two columns "t,lambda" with a header row.

inline Tabulated tabulated_from_csv(std::istream& in, Interp interp, Tail tail) {
  std::string line;
  domain_check(static_cast<bool>(std::getline(in, line)), "tabulated csv: empty input");
  std::vector<double> t, lam;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    domain_check(static_cast<bool>(std::getline(row, a, ',')) &&
                 static_cast<bool>(std::getline(row, b, ',')),
                 "tabulated csv: expected two comma-separated columns");
    t.push_back(std::stod(a));
    lam.push_back(std::stod(b));
  }
  return Tabulated(std::move(t), std::move(lam), interp, tail);
}

}  // namespace bequest

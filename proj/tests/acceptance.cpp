// Acceptance gate.  Eleven independent criteria, one PASS/FAIL line
// each; the process exits non-zero if any criterion fails.  Tolerances
// are pinned here on purpose — do not loosen them to make a run green.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bequest/discrete_dp.hpp"
#include "bequest/montecarlo.hpp"
#include "bequest/optimal.hpp"

using namespace bequest;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double x, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// --- 1: threshold values on the gamma-two market ---------------------------
void criterion_1() {
  auto start = std::chrono::steady_clock::now();
  ProblemSpec spec(GammaTwo(0.05), 0.02, 0.0);
  const double times[] = {25.0, 40.0, 75.0, 150.0};
  const double targets[] = {0.448, 0.511, 0.582, 0.630};
  const double tol = 0.005;
  bool ok = true;
  std::ostringstream detail;
  for (int k = 0; k < 4; ++k) {
    ThresholdResult res = find_threshold(spec, times[k]);
    bool hit = res.crossing && res.valid && std::abs(res.wstar - targets[k]) <= tol;
    ok = ok && hit;
    detail << "w*(" << times[k] << ")=" << fmt(res.wstar) << (res.valid ? "" : "[invalid]")
           << (k + 1 < 4 ? " " : "");
  }
  double elapsed = seconds_since(start);
  ok = ok && elapsed < 10.0;
  detail << " tol " << tol << ", " << fmt(elapsed, 3) << "s < 10s";
  report(1, ok, detail.str());
}

// --- 2: onset of valid thresholds -------------------------------------------
void criterion_2() {
  ProblemSpec spec(GammaTwo(0.05), 0.02, 0.0);
  double onset = -1.0;
  for (int k = 0; k <= 300; ++k) {
    double t = 0.1 * k;
    bool valid = false;
    try {
      ThresholdResult res = find_threshold(spec, t);
      valid = res.crossing && res.valid;
    } catch (const numerical_error&) {
      valid = false;  // an ambiguous crossing is not a valid threshold
    }
    if (valid) {
      onset = t;
      break;
    }
  }
  bool ok = onset >= 12.9 && onset <= 13.9;
  report(2, ok, "first valid threshold in a 0.1-step scan at t=" + fmt(onset) +
                    ", required within [12.9, 13.9]");
}

// --- 3: threshold curve shape up to t = 200 ---------------------------------
void criterion_3() {
  ProblemSpec spec(GammaTwo(0.05), 0.02, 0.0);
  std::vector<double> times;
  for (double t = 15.0; t <= 200.0; t += 5.0) times.push_back(t);
  ThresholdCurve curve = build_threshold_curve(spec, times);
  bool monotone = true, bounded = true;
  double prev = -kInf, top = -kInf;
  for (double w : curve.wstar) {
    if (std::isnan(w)) continue;
    monotone = monotone && w >= prev - 1e-9;
    bounded = bounded && w <= 0.682;
    prev = w;
    top = std::max(top, w);
  }
  double at200 = curve.wstar.back();
  bool ok = monotone && bounded && at200 > 0.630;
  report(3, ok, std::string("curve over [15,200]: ") + (monotone ? "non-decreasing" : "NOT monotone") +
                    ", max " + fmt(top) + " <= 0.682, w*(200)=" + fmt(at200) + " > 0.630");
}

// --- 4: zero-interest closed form is law-independent ------------------------
void criterion_4() {
  std::vector<MortalityLaw> laws = {GammaTwo(0.05), DeMoivre(80.0)};
  double worst = 0.0;
  for (const MortalityLaw& law : laws) {
    for (double theta : {0.0, 0.25, 1.0}) {
      ProblemSpec spec(law, 0.0, theta);
      for (int k = 0; k < 50; ++k) {
        double w = 0.01 + 0.98 * k / 49.0;
        double closed = 1.0 - std::pow(1.0 - w, 1.0 / (1.0 + theta));
        worst = std::max(worst, std::abs(eval_full(spec, w, 0.0).phi - closed));
      }
    }
  }
  report(4, worst <= 1e-8,
         "r=0 full-coverage value vs 1-(1-w)^{1/(1+theta)}: max |err| = " + fmt(worst, 3) +
             " <= 1e-8 over 2 laws x 3 loadings x 50 wealth points");
}

// --- 5: gamma-two survival fact ----------------------------------------------
void criterion_5() {
  MortalityLaw law = GammaTwo(0.05);
  double s = survival(law, 0.0, 75.0);
  double closed = (1.0 + 0.05 * 75.0) * std::exp(-0.05 * 75.0);
  bool ok = s >= 0.105 && s <= 0.118 && std::abs(s - closed) <= 1e-10;
  report(5, ok, "survival(0,75) = " + fmt(s, 9) + " in [0.105, 0.118], |err vs (1+mu t)e^{-mu t}| = " +
                    fmt(std::abs(s - closed), 3));
}

// --- 6: variational inequality on two verified candidates -------------------
void criterion_6() {
  ProblemSpec waiter(ConstantForce(0.01), 0.02, 0.0);
  VIReport wrep = vi_check(
      waiter, make_wait_lattice(waiter, linspace(0.0, 80.0, 101), linspace(0.0, 1.0, 101)));

  ProblemSpec wtf(DeMoivre(100.0), 0.02, 0.0);
  VIReport orep =
      vi_check(wtf, make_optimal_lattice(wtf, linspace(0.0, 90.0, 101), linspace(0.0, 1.0, 101)));

  bool ok = wrep.pass && orep.pass;
  report(6, ok, "101x101 grids, pde tol 1e-3: wait-value residual " + fmt(wrep.pde_residual_max, 3) +
                    (wrep.pass ? " (pass)" : " (FAIL)") + ", wait-then-buy residual " +
                    fmt(orep.pde_residual_max, 3) + (orep.pass ? " (pass)" : " (FAIL)"));
}

// --- 7: buying is strictly improving at the hazard crossing -----------------
void criterion_7() {
  ProblemSpec spec(GammaTwo(0.05), 0.03, 0.0);
  auto tr = compute_tr(spec);
  bool ok = tr.has_value() && std::abs(*tr - 30.0) <= 1e-6;
  double worst = -kInf;
  if (ok) {
    double wbar = safe_level(spec, *tr);
    for (int k = 0; k < 50; ++k) {
      double w = (0.02 + 0.96 * k / 49.0) * wbar;
      double expr = 1.0 - (1.0 - w) * eval_full(spec, w, *tr).phi_w;
      worst = std::max(worst, expr);
      ok = ok && expr < 0.0;
    }
  }
  report(7, ok, "t_r = " + fmt(tr ? *tr : kNaN) + "; max of 1-(1-w)phi^f_w over 50 points = " +
                    fmt(worst, 3) + " < 0");
}

// --- 8: analytic wealth derivatives vs central differences ------------------
void criterion_8() {
  struct Case {
    ProblemSpec spec;
    double t, lo, hi;
  };
  std::vector<Case> cases = {{ProblemSpec(GammaTwo(0.05), 0.02, 0.25), 10.0, 0.03, 0.97},
                             {ProblemSpec(DeMoivre(100.0), 0.02, 0.0), 30.0, 0.50, 0.97}};
  double worst = 0.0;
  const double h = 1e-5;
  for (const Case& c : cases) {
    double wbar = safe_level(c.spec, c.t);
    for (int k = 0; k < 20; ++k) {
      double w = (c.lo + (c.hi - c.lo) * k / 19.0) * wbar;
      double fd_full =
          (eval_full(c.spec, w + h, c.t).phi - eval_full(c.spec, w - h, c.t).phi) / (2.0 * h);
      worst = std::max(worst, std::abs(eval_full(c.spec, w, c.t).phi_w - fd_full) /
                                  std::abs(fd_full));
      double fd_wait =
          (eval_wait(c.spec, w + h, c.t).phi - eval_wait(c.spec, w - h, c.t).phi) / (2.0 * h);
      worst = std::max(worst, std::abs(eval_wait(c.spec, w, c.t).phi_w - fd_wait) /
                                  std::abs(fd_wait));
    }
  }
  report(8, worst <= 1e-4,
         "max relative gap, analytic vs central difference, 2 laws x 20 points x both "
         "strategies: " + fmt(worst, 3) + " <= 1e-4");
}

// --- 9: Monte Carlo concordance ----------------------------------------------
void criterion_9() {
  auto start = std::chrono::steady_clock::now();
  ProblemSpec spec(GammaTwo(0.05), 0.02, 0.0);
  const std::int64_t n = 100000;
  const std::uint64_t seed = 20260815;
  bool ok = true;
  double worst_z = 0.0;
  for (auto [w, t] : {std::pair{0.3, 0.0}, std::pair{0.5, 20.0}}) {
    struct Probe {
      Policy policy;
      double truth;
    };
    std::vector<Probe> probes = {{FullUntilRuin{}, eval_full(spec, w, t).phi},
                                 {WaitUntilSafe{}, eval_wait(spec, w, t).phi},
                                 {Deferred{t + 5.0}, eval_deferred(spec, w, t, t + 5.0)}};
    for (const Probe& p : probes) {
      SimResult res = simulate(spec, p.policy, w, t, n, seed);
      double se = std::sqrt(p.truth * (1.0 - p.truth) / n);
      double z = std::abs(res.estimate - p.truth) / se;
      worst_z = std::max(worst_z, z);
      ok = ok && z <= 3.0;
    }
  }
  double elapsed = seconds_since(start);
  ok = ok && elapsed < 30.0;
  report(9, ok, "6 policy/point estimates at n=1e5: max |z| = " + fmt(worst_z, 3) +
                    " <= 3, " + fmt(elapsed, 3) + "s < 30s");
}

// --- 10: discrete recursion vs exhaustive enumeration -----------------------
std::string mask_string(std::uint32_t mask, std::size_t periods) {
  std::string s;
  for (std::size_t bit = 0; bit + 1 < periods; ++bit) s += ((mask >> bit) & 1u) ? 'b' : 'w';
  return s.empty() ? "-" : s;
}

void criterion_10() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> len(1, 8);
  int exact = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    int nq = len(rng);
    std::vector<double> q(nq);
    for (int k = 0; k + 1 < nq; ++k) q[k] = unit(rng);
    q[nq - 1] = 1.0;
    DiscreteSpec spec(DiscreteMortality(q), 1.5 * unit(rng), 1.2 * unit(rng));
    double w0 = 1.3 * unit(rng);
    if (dp_value(spec, w0, 0) == enumerate_oracle(spec, w0).value) ++exact;
  }

  // Worked three-period example: recursion value and survival-path
  // actions, enumeration argmax set, and the comparison against the
  // reference walk-through, which quotes 0.72 from buy-then-wait.
  DiscreteSpec ex(DiscreteMortality({0.3, 0.4, 1.0}), 1.0, 0.0);
  double dp = dp_value(ex, 0.3, 0);
  OracleResult oracle = enumerate_oracle(ex, 0.3);
  PolicyTable path = dp_policy_path(ex, 0.3);
  std::string actions;
  for (std::size_t k = 0; k + 1 < path.size(); ++k)
    actions += path[k].action == Action::Buy ? 'b' : 'w';
  std::string best;
  for (std::size_t k = 0; k < oracle.best.size(); ++k)
    best += (k ? "," : "") + mask_string(oracle.best[k], ex.mortality.periods());

  bool routes_agree = dp == oracle.value;
  bool matches_reference = std::abs(dp - 0.72) < 1e-12 && best == "bw";
  bool ok = exact == trials && routes_agree;
  std::string note = matches_reference
                         ? "matches the reference walk-through"
                         : "reference walk-through quotes 0.72 via 'bw'; discrepancy documented";
  report(10, ok, fmt(exact, 3) + "/200 random specs bit-exact; example: recursion=" + fmt(dp) +
                     " path=" + actions + " oracle=" + fmt(oracle.value) + " best={" + best +
                     "}; " + note);
}

// --- 11: value orderings near the wealth boundaries --------------------------
void criterion_11() {
  bool ok = true;
  std::ostringstream detail;

  // Near the safe level on a finite horizon past t_r: buying wins.
  ProblemSpec dm(DeMoivre(100.0), 0.02, 0.0);
  double wbar = safe_level(dm, 60.0);
  for (double f : {0.95, 0.97, 0.99, 0.995})
    ok = ok && eval_full(dm, f * wbar, 60.0).phi > eval_wait(dm, f * wbar, 60.0).phi;
  detail << "full>wait near safe (flat density, t=60): " << (ok ? "yes" : "NO");

  // Near the safe level with a decreasing death density: waiting wins.
  ProblemSpec lin(LinearPdf(0.02, 60.0), 0.02, 0.0);
  double lbar = safe_level(lin, 0.0);
  bool lin_ok = true;
  for (double f : {0.95, 0.97, 0.99, 0.995})
    lin_ok = lin_ok && eval_full(lin, f * lbar, 0.0).phi < eval_wait(lin, f * lbar, 0.0).phi;
  ok = ok && lin_ok;
  detail << "; full<wait near safe (falling density, t=0): " << (lin_ok ? "yes" : "NO");

  // Near zero wealth past the hazard crossing on an infinite horizon.
  ProblemSpec gm(GammaTwo(0.05), 0.02, 0.0);
  double gbar = safe_level(gm, 20.0);
  bool gm_ok = true;
  for (double f : {0.001, 0.003, 0.01, 0.02})
    gm_ok = gm_ok && eval_full(gm, f * gbar, 20.0).phi > eval_wait(gm, f * gbar, 20.0).phi;
  ok = ok && gm_ok;
  detail << "; full>wait near zero (t=20 >= t_r): " << (gm_ok ? "yes" : "NO");

  report(11, ok, detail.str());
}

void guard(int id, void (*fn)()) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  guard(1, criterion_1);
  guard(2, criterion_2);
  guard(3, criterion_3);
  guard(4, criterion_4);
  guard(5, criterion_5);
  guard(6, criterion_6);
  guard(7, criterion_7);
  guard(8, criterion_8);
  guard(9, criterion_9);
  guard(10, criterion_10);
  guard(11, criterion_11);
  std::printf("%d of 11 criteria passed\n", 11 - g_failures);
  return g_failures == 0 ? 0 : 1;
}

// Discrete-time bequest problem: N periods with one-period death
// probabilities q_{x+k} (the last equal to 1), periodic interest i, and
// premium loading theta.  Each period the individual either waits or buys
// one-period term insurance sized to leave total wealth exactly 1 upon
// death that period; wealth left after the premium grows by (1+i).
//
// The value function follows the backward recursion
//   phi(w, N-1) = 1{w >= v},        v = 1/(1+i)
//   phi(w, k)   = max[ p phi(w(1+i), k+1),
//                      q + p phi((w(1+i) - q~)/(1 - q~), k+1) ]
// with q~ = min((1+theta) q, 1) and negative wealth an absorbing failure.
// An exhaustive enumeration oracle evaluates every buy/wait sequence with
// the same floating-point expressions, so the two agree bit for bit; the
// test suite asserts exact equality.
#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <unordered_map>
#include <vector>

#include "bequest/common.hpp"

namespace bequest {

struct DiscreteMortality {
  std::vector<double> q;  // q[k] = death probability in period k; q.back() == 1

  explicit DiscreteMortality(std::vector<double> probs) : q(std::move(probs)) {
    domain_check(!q.empty(), "DiscreteMortality: need at least one period");
    for (double qk : q)
      domain_check(qk >= 0.0 && qk <= 1.0, "DiscreteMortality: q outside [0, 1]");
    domain_check(q.back() == 1.0, "DiscreteMortality: final-period q must be exactly 1");
  }

  int periods() const { return static_cast<int>(q.size()); }
};

struct DiscreteSpec {
  DiscreteMortality mortality;
  double i = 0.0;      // periodic effective interest rate
  double theta = 0.0;  // premium loading
  double v = 1.0;      // discount factor 1/(1+i)
  std::vector<double> q_tilde;  // loaded death probabilities, clamped to <= 1

  DiscreteSpec(DiscreteMortality mort, double i_, double theta_)
      : mortality(std::move(mort)), i(i_), theta(theta_) {
    domain_check(i >= 0.0, "DiscreteSpec: interest rate must be >= 0");
    domain_check(theta >= 0.0, "DiscreteSpec: loading must be >= 0");
    v = 1.0 / (1.0 + i);
    q_tilde.reserve(mortality.q.size());
    for (double qk : mortality.q) q_tilde.push_back(std::min((1.0 + theta) * qk, 1.0));
  }

  int periods() const { return mortality.periods(); }
};

namespace detail {
// The value expressions below are shared verbatim between the recursion
// and the enumeration oracle, so both produce identical floating-point
// results.  dp_step is kept out of line: inlining would let the compiler
// specialize (and contract) it differently per call site, breaking the
// bit-for-bit agreement the tests assert.
[[gnu::noinline]] inline double dp_step(double q, double death_value, double continuation) {
  return q * death_value + (1.0 - q) * continuation;
}
inline double dp_grow(double w, double i) { return w * (1.0 + i); }
inline double dp_post_buy(double wg, double qt) { return (wg - qt) / (1.0 - qt); }

// End-of-period wealth reaches the bequest target (used by the oracle's
// wait action and by the actuarially-neutral q~ = 1 buy limit).
inline double dp_reaches_goal(double wg) { return wg >= 1.0 ? 1.0 : 0.0; }

inline std::uint64_t wealth_key(double w) {
  std::uint64_t bits;
  std::memcpy(&bits, &w, sizeof bits);
  return bits;
}
}  // namespace detail

// Success probability from state (w, k) under optimal buy/wait decisions.
// Memoized on the exact wealth bit pattern per period: the reachable
// states form a binary tree of depth N - k.
inline double dp_value(const DiscreteSpec& spec, double w, int k) {
  const int N = spec.periods();
  domain_check(k >= 0 && k < N, "dp_value: period index out of range");
  std::vector<std::unordered_map<std::uint64_t, double>> memo(N);

  auto rec = [&](auto&& self, double wealth, int kk) -> double {
    if (wealth < 0.0) return 0.0;  // ruin: no later success possible
    if (kk == N - 1) return wealth >= spec.v ? 1.0 : 0.0;
    std::uint64_t key = detail::wealth_key(wealth);
    if (auto it = memo[kk].find(key); it != memo[kk].end()) return it->second;
    double q = spec.mortality.q[kk];
    double qt = spec.q_tilde[kk];
    double wg = detail::dp_grow(wealth, spec.i);
    double wait = detail::dp_step(q, 0.0, self(self, wg, kk + 1));
    double buy = qt < 1.0
                     ? detail::dp_step(q, 1.0, self(self, detail::dp_post_buy(wg, qt), kk + 1))
                     : detail::dp_step(q, detail::dp_reaches_goal(wg), self(self, wg, kk + 1));
    double best = wait >= buy ? wait : buy;
    memo[kk].emplace(key, best);
    return best;
  };
  return rec(rec, w, k);
}

// One row of the policy table along the deterministic surviving path.
struct PolicyStep {
  int k = 0;
  double wealth = 0.0;  // wealth entering period k
  Action action = Action::Wait;
  double value = 0.0;  // optimal value from this state
  bool tie = false;    // both branches exactly equal (broken toward wait)
};

using PolicyTable = std::vector<PolicyStep>;

// Follows the surviving-wealth path from (w0, 0), recording the argmax
// action each period.  Exact value ties break toward wait and are
// reported.  The terminal period has no decision; it is recorded as a
// wait with the indicator value.
inline PolicyTable dp_policy_path(const DiscreteSpec& spec, double w0) {
  const int N = spec.periods();
  PolicyTable table;
  double w = w0;
  for (int k = 0; k < N - 1; ++k) {
    PolicyStep step;
    step.k = k;
    step.wealth = w;
    if (w < 0.0) {
      table.push_back(step);  // ruined: value 0, wait through
      continue;
    }
    double q = spec.mortality.q[k];
    double qt = spec.q_tilde[k];
    double wg = detail::dp_grow(w, spec.i);
    double wait = detail::dp_step(q, 0.0, dp_value(spec, wg, k + 1));
    double buy =
        qt < 1.0 ? detail::dp_step(q, 1.0, dp_value(spec, detail::dp_post_buy(wg, qt), k + 1))
                 : detail::dp_step(q, detail::dp_reaches_goal(wg), dp_value(spec, wg, k + 1));
    step.tie = wait == buy;
    step.action = buy > wait ? Action::Buy : Action::Wait;
    step.value = step.action == Action::Buy ? buy : wait;
    table.push_back(step);
    w = step.action == Action::Buy && qt < 1.0 ? detail::dp_post_buy(wg, qt) : wg;
  }
  PolicyStep last;
  last.k = N - 1;
  last.wealth = w;
  last.value = w >= spec.v ? 1.0 : 0.0;
  table.push_back(last);
  return table;
}

// Death benefit that tops end-of-period wealth up to exactly 1 when
// bought at the loaded one-period premium v q~ per unit.
inline double benefit(const DiscreteSpec& spec, double w, int k) {
  domain_check(k >= 0 && k < spec.periods(), "benefit: period index out of range");
  double qt = spec.q_tilde[k];
  domain_check(qt < 1.0, "benefit: loaded death probability is 1, benefit undefined");
  return (1.0 - (1.0 + spec.i) * w) / (1.0 - qt);
}

struct OracleResult {
  double value = 0.0;
  // Optimal action sequences as bitmasks over decision periods 0..N-2
  // (bit k set = buy in period k); the terminal period has no decision.
  std::vector<std::uint32_t> best;
};

// Exhaustive ground truth: evaluates every buy/wait sequence along the
// deterministic survival path with the same arithmetic as dp_value.
// Death in period k under "wait" succeeds iff end-of-period wealth
// already reaches 1 (dp_value needs no such term: whenever it holds, the
// buy branch attains the same success exactly).
inline OracleResult enumerate_oracle(const DiscreteSpec& spec, double w0) {
  const int N = spec.periods();
  domain_check(N <= 24, "enumerate_oracle: refuses N > 24 (2^N sequences)");
  const int decisions = N - 1;
  OracleResult out;
  out.value = -1.0;
  for (std::uint32_t mask = 0; mask < (1u << decisions); ++mask) {
    // Backward evaluation of this fixed action sequence.
    auto rec = [&](auto&& self, double w, int k) -> double {
      if (w < 0.0) return 0.0;
      if (k == N - 1) return w >= spec.v ? 1.0 : 0.0;
      double q = spec.mortality.q[k];
      double qt = spec.q_tilde[k];
      double wg = detail::dp_grow(w, spec.i);
      if (mask & (1u << k)) {
        if (qt < 1.0) return detail::dp_step(q, 1.0, self(self, detail::dp_post_buy(wg, qt), k + 1));
        return detail::dp_step(q, detail::dp_reaches_goal(wg), self(self, wg, k + 1));
      }
      return detail::dp_step(q, detail::dp_reaches_goal(wg), self(self, wg, k + 1));
    };
    double value = rec(rec, w0, 0);
    if (value > out.value) {
      out.value = value;
      out.best.assign(1, mask);
    } else if (value == out.value) {
      out.best.push_back(mask);
    }
  }
  return out;
}

}  // namespace bequest

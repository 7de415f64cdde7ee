// Shared error types and small helpers used across the bequest headers.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bequest {

// Thrown when an iterative routine (quadrature, root finding, policy
// walker) fails to converge.  The message carries diagnostics; callers
// map this to a distinct exit code in the CLI.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Purchase decision at a state: buy full term coverage or hold off.
enum class Action { Wait, Buy };

// n equally spaced values from a to b inclusive.
inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> xs(n);
  for (int k = 0; k < n; ++k) xs[k] = n > 1 ? a + (b - a) * k / (n - 1) : a;
  return xs;
}

// Precondition guard for caller-supplied values (ages, wealth fractions,
// configuration).  Violations are programming or input errors, not
// numerical failures.
inline void domain_check(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace bequest

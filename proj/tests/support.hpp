#pragma once
// Shared fixtures for the unit tests.

#include "refugia/config.hpp"

#include <initializer_list>
#include <string>
#include <utility>

namespace refugia::test {

inline Config config_with(std::initializer_list<std::pair<std::string, std::string>> overrides) {
  Config c;
  for (const auto& [k, v] : overrides) c.set(k, v);
  return c;
}

/// Default geometry on a coarse grid, for tests that solve many problems.
inline ProblemSpec coarse_spec(int n = 200, std::initializer_list<std::pair<std::string, std::string>> extra = {}) {
  Config c = config_with({{"n1", std::to_string(n)}, {"n2", std::to_string(n)}});
  for (const auto& [k, v] : extra) c.set(k, v);
  return make_problem(c);
}

}  // namespace refugia::test

#include <cmath>
#include <functional>

namespace refugia::test {

/// First sign change of f on (lo, hi) scanned in `cells` steps, refined by bisection.
inline double first_root(const std::function<double(double)>& f, double lo, double hi, int cells = 4000) {
  const double step = (hi - lo) / cells;
  double a = lo;
  double fa = f(a);
  for (int i = 1; i <= cells; ++i) {
    const double b = lo + i * step;
    const double fb = f(b);
    if ((fa < 0.0) != (fb < 0.0)) {
      double l = a;
      double r = b;
      for (int it = 0; it < 200 && r - l > 1e-15 * (1.0 + std::abs(r)); ++it) {
        const double mid = 0.5 * (l + r);
        if ((f(mid) < 0.0) == (fa < 0.0)) l = mid; else r = mid;
      }
      return 0.5 * (l + r);
    }
    a = b;
    fa = fb;
  }
  return std::nan("");
}

/// Membrane eigenproblem on (0,1) u (1,2), c = 0, m = 1, reflecting at 0 and lethal at 2:
/// u1 = A cos(kx), u2 = B sin(k(2-x)).  Zero of the 2x2 matching determinant in k.
inline double matching_determinant(double k, double g1, double g2) {
  const double s = std::sin(k);
  const double c = std::cos(k);
  return (-k * s + g1 * c) * (k * c + g2 * s) - g1 * g2 * s * c;
}

}  // namespace refugia::test

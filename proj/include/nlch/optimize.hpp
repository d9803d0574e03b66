#pragma once

#include <cmath>

namespace nlch {

struct ScalarMinimum {
  double argmin;
  double value;
};

/// Golden-section search for a unimodal f on [lo, hi].
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double tol = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  double fx = f(x);
  ScalarMinimum best{x, fx};
  // Endpoints matter when the minimum sits on the boundary.
  if (const double fl = f(lo); fl < best.value) best = {lo, fl};
  if (const double fh = f(hi); fh < best.value) best = {hi, fh};
  return best;
}

}  // namespace nlch

#pragma once

#include <cmath>
#include <functional>

namespace alq {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a minimum of `f` on [lo, hi]. Stops when the
/// bracket is narrower than `tol` or after `max_iter` steps. Returns the best
/// point evaluated, not the bracket midpoint.
inline ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                             double tol, int max_iter = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  ScalarMinimum best = fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
  for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
      if (fc < best.value) best = {c, fc};
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
      if (fd < best.value) best = {d, fd};
    }
  }
  return best;
}

}  // namespace alq

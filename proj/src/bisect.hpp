#pragma once

#include <cmath>

namespace jamgame::detail {

struct Bracket {
  double lo;
  double hi;
  double mid() const { return 0.5 * (lo + hi); }
};

// Shrinks [lo, hi] around the sign change of a nonincreasing f with
// f(lo) >= 0 >= f(hi). The returned bracket keeps f(lo) >= 0 > f(hi).
template <class F>
Bracket bisect_decreasing(F&& f, double lo, double hi, double tol) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

}  // namespace jamgame::detail

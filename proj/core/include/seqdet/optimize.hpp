#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace seqdet {

struct MinResult {
  double x = 0.0;
  double value = 0.0;
};

// Golden-section minimization on [lo, hi]; assumes f is unimodal there.
template <typename F>
MinResult golden_min(F&& f, double lo, double hi, double x_tol = 1e-10) {
  static const double inv_gr = (std::sqrt(5.0) - 1.0) / 2.0;  // 1/phi
  double a = lo, b = hi;
  double c = b - inv_gr * (b - a);
  double d = a + inv_gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_gr * (b - a);
      fd = f(d);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

// Scan n grid points (endpoints included), then refine around the best cell
// with golden section. Makes no global unimodality assumption: the scan
// brackets the basin, the refinement only assumes smoothness within one cell.
template <typename F>
MinResult grid_golden_min(F&& f, double lo, double hi, int n, double x_tol = 1e-10) {
  if (!(lo < hi)) return {lo, f(lo)};
  if (n < 2) n = 2;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  double best_x = lo, best_v = f(lo);
  for (int i = 1; i < n; ++i) {
    const double x = (i == n - 1) ? hi : lo + step * i;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double a = std::max(lo, best_x - step);
  const double b = std::min(hi, best_x + step);
  MinResult refined = golden_min(f, a, b, x_tol);
  if (best_v < refined.value) return {best_x, best_v};
  return refined;
}

template <typename F>
MinResult grid_golden_max(F&& f, double lo, double hi, int n, double x_tol = 1e-10) {
  MinResult r = grid_golden_min([&](double x) { return -f(x); }, lo, hi, n, x_tol);
  return {r.x, -r.value};
}

}  // namespace seqdet

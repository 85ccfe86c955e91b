#include "seqdet/param_set.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqdet {

ParamSet ParamSet::interval(double lo, double hi, int grid_n) {
  if (!(lo < hi)) throw std::invalid_argument("ParamSet::interval requires lo < hi");
  if (grid_n < 2) throw std::invalid_argument("ParamSet grid_n must be >= 2");
  ParamSet s;
  s.lo = lo;
  s.hi = hi;
  s.grid_n = grid_n;
  return s;
}

ParamSet ParamSet::singleton(double v) {
  ParamSet s;
  s.lo = v;
  s.hi = v;
  s.grid_n = 2;
  return s;
}

std::vector<double> ParamSet::grid() const { return grid(grid_n); }

std::vector<double> ParamSet::grid(int n) const {
  if (is_singleton()) return {lo};
  if (n < 2) throw std::invalid_argument("ParamSet grid size must be >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + step * i;
  g.front() = lo;
  g.back() = hi;
  return g;
}

void ParamSet::validate(const Family& f) const {
  if (!(lo <= hi)) throw std::invalid_argument("ParamSet requires lo <= hi");
  if (!is_singleton() && grid_n < 2) throw std::invalid_argument("ParamSet grid_n must be >= 2");
  if (!f.user_in_domain(lo) || !f.user_in_domain(hi))
    throw std::invalid_argument("ParamSet endpoints outside " + f.name() + " parameter domain");
}

double min_kl_on_grid(const Family& f, const ParamSet& theta, const ParamSet& lambda,
                      int n_per_axis) {
  const auto tg = theta.is_singleton() ? theta.grid() : theta.grid(std::max(2, n_per_axis));
  const auto lg = lambda.is_singleton() ? lambda.grid() : lambda.grid(std::max(2, n_per_axis));
  double best = std::numeric_limits<double>::infinity();
  for (double l : lg)
    for (double t : tg) best = std::min(best, f.kl(l, t));
  return best;
}

}  // namespace seqdet

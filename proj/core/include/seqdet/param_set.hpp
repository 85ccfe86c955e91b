#pragma once

#include <vector>

#include "seqdet/family.hpp"

namespace seqdet {

// Closed/open bookkeeping is descriptive; numeric scans always include the
// endpoints of the stored interval. A singleton set has lo == hi.
struct ParamSet {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_lo = true;
  bool closed_hi = true;
  int grid_n = 512;

  static ParamSet interval(double lo, double hi, int grid_n = 512);
  static ParamSet singleton(double v);

  bool is_singleton() const { return lo == hi; }
  double width() const { return hi - lo; }

  // grid_n points including both endpoints (a single point for singletons).
  std::vector<double> grid() const;
  std::vector<double> grid(int n) const;

  void validate(const Family& f) const;
};

// Smallest KL information over the product grid; used to enforce that a
// pre-change set and a post-change set are separated.
double min_kl_on_grid(const Family& f, const ParamSet& theta, const ParamSet& lambda,
                      int n_per_axis = 64);

}  // namespace seqdet

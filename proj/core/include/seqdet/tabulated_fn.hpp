#pragma once

#include <functional>
#include <vector>

#include "seqdet/param_set.hpp"

namespace seqdet {

// Piecewise-linear positive function on a finite parameter window.
// Node abscissae are strictly increasing, node values strictly positive.
// Evaluation clamps to the window endpoints.
class TabulatedFn {
 public:
  TabulatedFn(std::vector<double> xs, std::vector<double> ys);

  static TabulatedFn constant(const ParamSet& on, double value);
  static TabulatedFn sample(const ParamSet& on, const std::function<double(double)>& fn);

  double operator()(double x) const;

  double lo() const { return xs_.front(); }
  double hi() const { return xs_.back(); }
  std::size_t size() const { return xs_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

}  // namespace seqdet

#include "seqdet/tabulated_fn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqdet {

TabulatedFn::TabulatedFn(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.empty() || xs_.size() != ys_.size())
    throw std::invalid_argument("TabulatedFn: need equally many abscissae and values");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i]))
      throw std::invalid_argument("TabulatedFn: nodes must be finite");
    if (ys_[i] <= 0.0) throw std::invalid_argument("TabulatedFn: values must be positive");
    if (i > 0 && !(xs_[i - 1] < xs_[i]))
      throw std::invalid_argument("TabulatedFn: abscissae must be strictly increasing");
  }
}

TabulatedFn TabulatedFn::constant(const ParamSet& on, double value) {
  return sample(on, [value](double) { return value; });
}

TabulatedFn TabulatedFn::sample(const ParamSet& on, const std::function<double(double)>& fn) {
  const auto xs = on.grid();
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) ys.push_back(fn(x));
  return TabulatedFn(xs, std::move(ys));
}

double TabulatedFn::operator()(double x) const {
  if (xs_.size() == 1) return ys_.front();
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
}

}  // namespace seqdet

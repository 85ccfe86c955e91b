#include "seqdet/family.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace seqdet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void domain_fail(const std::string& what, double value, double lo, double hi) {
  std::ostringstream os;
  os << what << " " << value << " outside (" << lo << ", " << hi << ")";
  throw std::domain_error(os.str());
}

}  // namespace

Family Family::normal_mean_unit_var() {
  Spec s;
  s.name = "normal";
  s.natural_lo = -kInf;
  s.natural_hi = kInf;
  // b(xi) = xi^2 / 2 against the standard normal carrier; user parameter is
  // the mean and coincides with the natural parameter.
  s.cumulant = [](double xi, int order) {
    switch (order) {
      case 0: return 0.5 * xi * xi;
      case 1: return xi;
      default: return 1.0;
    }
  };
  s.to_natural = [](double u) { return u; };
  s.from_natural = [](double xi) { return xi; };
  s.sampler = [](double u, std::mt19937_64& rng) {
    std::normal_distribution<double> d(u, 1.0);
    return d(rng);
  };
  s.natural_from_mean = [](double m) { return m; };
  s.in_support = [](double) { return true; };
  s.mean_unbounded_below = true;
  return Family(Kind::normal_mean, std::move(s));
}

Family Family::exponential_rate() {
  Spec s;
  s.name = "exponential";
  s.natural_lo = -kInf;
  s.natural_hi = 0.0;
  // Density rate*exp(-rate*x) on x > 0: user rate r > 0 maps to xi = -r with
  // b(xi) = -log(-xi), so b' = -1/xi = 1/r (the mean) and b'' = 1/xi^2.
  s.cumulant = [](double xi, int order) {
    switch (order) {
      case 0: return -std::log(-xi);
      case 1: return -1.0 / xi;
      default: return 1.0 / (xi * xi);
    }
  };
  s.to_natural = [](double u) { return -u; };
  s.from_natural = [](double xi) { return -xi; };
  s.sampler = [](double u, std::mt19937_64& rng) {
    std::exponential_distribution<double> d(u);
    return d(rng);
  };
  s.natural_from_mean = [](double m) { return -1.0 / m; };
  s.in_support = [](double x) { return x > 0.0; };
  s.mean_unbounded_below = false;
  return Family(Kind::exponential_rate, std::move(s));
}

Family Family::custom(Spec spec) {
  if (!spec.cumulant || !spec.to_natural || !spec.from_natural || !spec.sampler)
    throw std::invalid_argument("custom family: cumulant, parameter maps and sampler are required");
  if (!spec.in_support) spec.in_support = [](double) { return true; };
  if (spec.name.empty()) spec.name = "custom";
  return Family(Kind::custom, std::move(spec));
}

bool Family::natural_in_domain(double xi) const {
  return std::isfinite(xi) && xi > spec_.natural_lo && xi < spec_.natural_hi;
}

bool Family::user_in_domain(double user) const {
  if (!std::isfinite(user)) return false;
  return natural_in_domain(spec_.to_natural(user));
}

double Family::natural(double user) const {
  const double xi = spec_.to_natural(user);
  if (!natural_in_domain(xi))
    domain_fail(spec_.name + ": natural parameter", xi, spec_.natural_lo, spec_.natural_hi);
  return xi;
}

double Family::user(double natural) const {
  if (!natural_in_domain(natural))
    domain_fail(spec_.name + ": natural parameter", natural, spec_.natural_lo, spec_.natural_hi);
  return spec_.from_natural(natural);
}

double Family::cumulant(double xi, int order) const {
  if (order < 0 || order > 2) throw std::invalid_argument("cumulant order must be 0, 1 or 2");
  if (!natural_in_domain(xi))
    domain_fail(spec_.name + ": natural parameter", xi, spec_.natural_lo, spec_.natural_hi);
  return spec_.cumulant(xi, order);
}

double Family::natural_from_mean(double m) const {
  if (!spec_.natural_from_mean)
    throw std::logic_error(spec_.name + ": no closed-form mean inversion");
  return spec_.natural_from_mean(m);
}

double Family::kl(double lambda_user, double theta_user) const {
  const double xl = natural(lambda_user);
  const double xt = natural(theta_user);
  return (xl - xt) * spec_.cumulant(xl, 1) - (spec_.cumulant(xl, 0) - spec_.cumulant(xt, 0));
}

double Family::phi(double theta_user, double lambda_user) const {
  const double xl = natural(lambda_user);
  const double xt = natural(theta_user);
  if (xl == xt) throw std::domain_error(spec_.name + ": phi undefined at theta == lambda");
  return (spec_.cumulant(xl, 0) - spec_.cumulant(xt, 0)) / (xl - xt);
}

double Family::llr(double lambda_user, double theta_user, double x) const {
  const double xl = natural(lambda_user);
  const double xt = natural(theta_user);
  return (xl - xt) * x - (spec_.cumulant(xl, 0) - spec_.cumulant(xt, 0));
}

double Family::sample(double user, std::mt19937_64& rng) const {
  natural(user);  // domain check
  return spec_.sampler(user, rng);
}

bool Family::in_support(double x) const { return std::isfinite(x) && spec_.in_support(x); }

std::string to_string(Family::Kind kind) {
  switch (kind) {
    case Family::Kind::normal_mean: return "normal";
    case Family::Kind::exponential_rate: return "exponential";
    default: return "custom";
  }
}

}  // namespace seqdet

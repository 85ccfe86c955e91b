#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>

namespace seqdet {

// One-parameter exponential family in natural form,
//   f_xi(x) = exp(xi * x - b(xi))  w.r.t. a fixed carrier measure,
// described by its cumulant b and a user-facing parameterization.
// All log quantities are in nats.
class Family {
 public:
  enum class Kind { normal_mean, exponential_rate, custom };

  // Extension contract: supply the cumulant (orders 0/1/2), the bijection
  // between the user parameter and the natural parameter, an exact sampler,
  // and support/shape metadata. natural_from_mean may be left empty; callers
  // then fall back to numeric inversion.
  struct Spec {
    std::string name;
    double natural_lo = 0.0;
    double natural_hi = 0.0;
    std::function<double(double, int)> cumulant;
    std::function<double(double)> to_natural;
    std::function<double(double)> from_natural;
    std::function<double(double, std::mt19937_64&)> sampler;
    std::function<double(double)> natural_from_mean;
    std::function<bool(double)> in_support;
    // true when the family mean b'(xi) tends to -inf at the lower edge of the
    // natural interval (needed by the half-open detector variant).
    bool mean_unbounded_below = false;
  };

  static Family normal_mean_unit_var();
  static Family exponential_rate();
  static Family custom(Spec spec);

  Kind kind() const { return kind_; }
  const std::string& name() const { return spec_.name; }

  double natural_lo() const { return spec_.natural_lo; }
  double natural_hi() const { return spec_.natural_hi; }
  bool natural_in_domain(double xi) const;
  bool user_in_domain(double user) const;

  double natural(double user) const;     // user -> xi, domain checked
  double user(double natural) const;     // xi -> user

  // b, b', b'' at natural parameter xi; order in {0,1,2}.
  double cumulant(double xi, int order) const;

  double mean(double user) const { return cumulant(natural(user), 1); }

  bool has_mean_inverse() const { return static_cast<bool>(spec_.natural_from_mean); }
  double natural_from_mean(double m) const;

  // Kullback-Leibler information I(lambda, theta) = E_lambda log(f_lambda/f_theta).
  double kl(double lambda_user, double theta_user) const;

  // phi(theta) = (b(xi_lambda) - b(xi_theta)) / (xi_lambda - xi_theta);
  // strictly increasing in theta's natural coordinate, errors when
  // theta == lambda.
  double phi(double theta_user, double lambda_user) const;

  // Per-observation log-likelihood ratio log(f_lambda(x)/f_theta(x)).
  double llr(double lambda_user, double theta_user, double x) const;

  double sample(double user, std::mt19937_64& rng) const;
  bool in_support(double x) const;

  bool mean_unbounded_below() const { return spec_.mean_unbounded_below; }

 private:
  Family(Kind kind, Spec spec) : kind_(kind), spec_(std::move(spec)) {}

  Kind kind_;
  Spec spec_;
};

std::string to_string(Family::Kind kind);

}  // namespace seqdet

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "seqdet/family.hpp"

using seqdet::Family;

namespace {
const Family kNormal = Family::normal_mean_unit_var();
const Family kExp = Family::exponential_rate();
}  // namespace

TEST_CASE("cumulant closed forms") {
  CHECK(kNormal.cumulant(0.7, 0) == doctest::Approx(0.245).epsilon(1e-12));
  CHECK(kNormal.cumulant(0.7, 1) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(kNormal.cumulant(-3.2, 2) == 1.0);

  CHECK(kExp.cumulant(kExp.natural(1.0), 0) == doctest::Approx(0.0));
  CHECK(kExp.natural(1.0) == -1.0);
  CHECK(kExp.cumulant(-2.0, 1) == doctest::Approx(0.5));   // mean of rate 2
  CHECK(kExp.cumulant(-2.0, 2) == doctest::Approx(0.25));  // variance of rate 2

  CHECK_THROWS_AS(kExp.cumulant(0.5, 0), std::domain_error);
  CHECK_THROWS_AS(kExp.cumulant(0.0, 0), std::domain_error);
  CHECK_THROWS_AS(kNormal.cumulant(1.0, 3), std::invalid_argument);
}

TEST_CASE("user parameter domains") {
  CHECK(kNormal.natural(-0.5) == -0.5);
  CHECK(kNormal.user(-0.5) == -0.5);
  CHECK(kExp.natural(2.0) == -2.0);
  CHECK(kExp.user(-2.0) == 2.0);
  CHECK_THROWS_AS(kExp.natural(-1.0), std::domain_error);
  CHECK_THROWS_AS(kExp.natural(0.0), std::domain_error);
  CHECK(kExp.user_in_domain(3.0));
  CHECK_FALSE(kExp.user_in_domain(-3.0));
  CHECK_FALSE(kNormal.user_in_domain(std::numeric_limits<double>::infinity()));
}

TEST_CASE("kl closed forms and positivity") {
  CHECK(kNormal.kl(0.0, -0.5) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(kNormal.kl(0.0, -1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(kExp.kl(2.0, 1.0) == doctest::Approx(0.5 - 1.0 + std::log(2.0)).epsilon(1e-14));
  CHECK(kExp.kl(2.0, 1.0) == doctest::Approx(0.193147).epsilon(1e-5));
  CHECK(kNormal.kl(0.7, 0.7) == 0.0);
  CHECK(kExp.kl(1.3, 1.3) == 0.0);

  for (double l : {-1.5, -0.3, 0.4, 2.0}) {
    for (double t : {-2.0, -0.4, 0.9, 1.7}) {
      const double v = kNormal.kl(l, t);
      CHECK(v == doctest::Approx(0.5 * (l - t) * (l - t)).epsilon(1e-12));
      if (l != t) CHECK(v > 1e-12);
    }
  }
  for (double l : {0.5, 1.0, 2.5}) {
    for (double t : {0.8, 1.9, 3.0}) {
      const double v = kExp.kl(l, t);
      CHECK(v == doctest::Approx(t / l - 1.0 - std::log(t / l)).epsilon(1e-12));
      CHECK(v >= 0.0);
      if (l != t) CHECK(v > 1e-12);
    }
  }
}

TEST_CASE("phi values and monotonicity") {
  CHECK(kNormal.phi(-1.0, 0.0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(kNormal.phi(-0.5, 0.0) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(kExp.phi(1.0, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(kNormal.phi(0.3, 0.3), std::domain_error);

  double prev = kNormal.phi(-2.0, 0.5);
  for (double t = -1.8; t < 0.4; t += 0.2) {
    const double cur = kNormal.phi(t, 0.5);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("llr closed form and expectation") {
  CHECK(kNormal.llr(0.0, -0.5, 0.25) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(kNormal.llr(0.9, 0.9, 123.4) == 0.0);
  CHECK(kExp.llr(2.0, 1.0, 0.5) == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-14));

  // E_lambda llr(lambda, theta, X) = I(lambda, theta), within 4 SEs.
  std::mt19937_64 rng(20260814);
  const double lam = 2.0, th = 1.0;
  double sum = 0.0, sum2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = kExp.llr(lam, th, kExp.sample(lam, rng));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - kExp.kl(lam, th)) <= 4.0 * se);
}

TEST_CASE("sampling moments and determinism") {
  std::mt19937_64 rng(7);
  double acc = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) acc += kNormal.sample(-1.0, rng);
  CHECK(std::abs(acc / n - (-1.0)) < 0.004);

  acc = 0.0;
  std::mt19937_64 rng2(8);
  for (int i = 0; i < n; ++i) acc += kExp.sample(1.0, rng2);
  CHECK(std::abs(acc / n - 1.0) < 0.004);

  std::mt19937_64 ra(99), rb(99);
  for (int i = 0; i < 16; ++i) CHECK(kExp.sample(0.7, ra) == kExp.sample(0.7, rb));

  CHECK_THROWS_AS(kExp.sample(-2.0, rng), std::domain_error);
}

TEST_CASE("support and shape flags") {
  CHECK(kNormal.mean_unbounded_below());
  CHECK_FALSE(kExp.mean_unbounded_below());
  CHECK(kNormal.in_support(-12.0));
  CHECK(kExp.in_support(0.1));
  CHECK_FALSE(kExp.in_support(0.0));
  CHECK_FALSE(kExp.in_support(-1.0));
  CHECK_FALSE(kNormal.in_support(std::numeric_limits<double>::quiet_NaN()));
  CHECK(kNormal.mean(0.25) == doctest::Approx(0.25));
  CHECK(kExp.mean(2.0) == doctest::Approx(0.5));
  CHECK(kExp.natural_from_mean(0.5) == doctest::Approx(-2.0));
}

TEST_CASE("custom family contract") {
  Family::Spec s;
  s.name = "shifted-normal";
  s.natural_lo = -std::numeric_limits<double>::infinity();
  s.natural_hi = std::numeric_limits<double>::infinity();
  s.cumulant = [](double xi, int order) {
    return order == 0 ? 0.5 * xi * xi : (order == 1 ? xi : 1.0);
  };
  s.to_natural = [](double u) { return u - 1.0; };  // user = mean + 1
  s.from_natural = [](double xi) { return xi + 1.0; };
  s.sampler = [](double u, std::mt19937_64& rng) {
    std::normal_distribution<double> d(u - 1.0, 1.0);
    return d(rng);
  };
  const Family g = Family::custom(s);
  CHECK(g.kind() == Family::Kind::custom);
  CHECK(g.kl(1.0, 0.5) == doctest::Approx(kNormal.kl(0.0, -0.5)).epsilon(1e-14));
  CHECK(g.llr(1.0, 0.5, 0.25) == doctest::Approx(kNormal.llr(0.0, -0.5, 0.25)).epsilon(1e-14));

  Family::Spec broken;
  broken.cumulant = s.cumulant;
  CHECK_THROWS_AS(Family::custom(broken), std::invalid_argument);

  CHECK(seqdet::to_string(Family::Kind::normal_mean) == "normal");
  CHECK(seqdet::to_string(Family::Kind::exponential_rate) == "exponential");
}

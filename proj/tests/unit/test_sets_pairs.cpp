#include <cmath>
#include <numbers>

#include "doctest.h"
#include "seqdet/optimize.hpp"
#include "seqdet/optimizer_pair.hpp"
#include "seqdet/param_set.hpp"
#include "seqdet/tabulated_fn.hpp"

using namespace seqdet;

namespace {
const Family kNormal = Family::normal_mean_unit_var();
const Family kExp = Family::exponential_rate();
}  // namespace

TEST_CASE("param set construction and grids") {
  const ParamSet s = ParamSet::interval(0.8, 1.0, 5);
  CHECK_FALSE(s.is_singleton());
  const auto g = s.grid();
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.8);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == doctest::Approx(0.9));

  const ParamSet p = ParamSet::singleton(2.5);
  CHECK(p.is_singleton());
  CHECK(p.grid().size() == 1);
  CHECK(p.grid(100).size() == 1);
  CHECK(p.grid(100)[0] == 2.5);

  CHECK_THROWS_AS(ParamSet::interval(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ParamSet::interval(2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ParamSet::interval(0.0, 1.0, 1), std::invalid_argument);

  CHECK_NOTHROW(ParamSet::interval(0.5, 2.0).validate(kExp));
  CHECK_THROWS_AS(ParamSet::interval(-0.5, 2.0).validate(kExp), std::invalid_argument);
  CHECK_NOTHROW(ParamSet::interval(-4.0, 4.0).validate(kNormal));
}

TEST_CASE("min kl separation over the product grid") {
  CHECK(min_kl_on_grid(kExp, ParamSet::interval(0.8, 1.0), ParamSet::interval(2.0, 3.0)) > 0.0);
  // Sets sharing a point include it in both grids.
  CHECK(min_kl_on_grid(kExp, ParamSet::interval(0.8, 1.0), ParamSet::interval(1.0, 2.0)) ==
        0.0);
  CHECK(min_kl_on_grid(kNormal, ParamSet::interval(-1.0, -0.5), ParamSet::singleton(0.0)) ==
        doctest::Approx(0.125));
}

TEST_CASE("tabulated function behavior") {
  const TabulatedFn f({0.0, 1.0, 3.0}, {2.0, 4.0, 4.0});
  CHECK(f(0.0) == 2.0);
  CHECK(f(1.0) == 4.0);
  CHECK(f(0.5) == doctest::Approx(3.0));
  CHECK(f(2.0) == doctest::Approx(4.0));
  CHECK(f(-5.0) == 2.0);   // clamps
  CHECK(f(99.0) == 4.0);
  CHECK(f.size() == 3);

  CHECK_THROWS_AS(TabulatedFn({1.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TabulatedFn({0.0, 1.0}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(TabulatedFn({}, {}), std::invalid_argument);

  const TabulatedFn c = TabulatedFn::constant(ParamSet::interval(2.0, 3.0), 7.5);
  CHECK(c(2.4) == 7.5);
  const TabulatedFn s =
      TabulatedFn::sample(ParamSet::interval(1.0, 2.0, 11), [](double x) { return x * x; });
  CHECK(s(1.5) == doctest::Approx(2.25).epsilon(1e-3));
  CHECK(s(2.0) == doctest::Approx(4.0));
}

TEST_CASE("golden and grid optimization") {
  const auto r = golden_min([](double x) { return (x - 2.0) * (x - 2.0) + 3.0; }, 0.0, 5.0);
  CHECK(r.x == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));

  // Two local minima; the tilt makes the left one global. The stationary
  // point solves sin(x) = 0.01 just left of pi.
  auto f = [](double x) { return std::cos(x) + 0.01 * x; };
  const auto g = grid_golden_min(f, 0.0, 10.0, 64);
  CHECK(g.x == doctest::Approx(std::numbers::pi - std::asin(0.01)).epsilon(1e-6));

  const auto m = grid_golden_max([](double x) { return -(x - 1.0) * (x - 1.0); }, 0.0, 3.0, 16);
  CHECK(m.x == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(m.value == doctest::Approx(0.0));

  // Boundary minimum and degenerate window.
  const auto b = grid_golden_min([](double x) { return x; }, 1.0, 2.0, 8);
  CHECK(b.x == doctest::Approx(1.0));
  const auto d = grid_golden_min([](double x) { return x * x; }, 1.5, 1.5, 8);
  CHECK(d.x == 1.5);
}

TEST_CASE("optimizer_from reference cases") {
  const ParamSet theta = ParamSet::interval(0.8, 1.0, 64);
  const ParamSet lambda = ParamSet::interval(2.0, 3.0, 64);

  // q0 = 1 on the rate interval: the minimizing lambda is the near endpoint.
  // Exact at tabulation nodes; between nodes only interpolation error enters.
  const TabulatedFn p = optimizer_from(TabulatedFn::constant(lambda, 1.0), kExp, theta);
  for (double t : theta.grid())
    CHECK(p(t) == doctest::Approx(kExp.kl(2.0, t)).epsilon(1e-10));
  CHECK(p(0.8503) == doctest::Approx(kExp.kl(2.0, 0.8503)).epsilon(1e-4));

  // Singleton post-change set.
  const TabulatedFn ps =
      optimizer_from(TabulatedFn::constant(ParamSet::singleton(2.0), 1.0), kExp, theta);
  for (double t : theta.grid())
    CHECK(ps(t) == doctest::Approx(kExp.kl(2.0, t)).epsilon(1e-12));

  // Simple pre-change set with q0 = I0: the flat boundary p = 1.
  const ParamSet simple = ParamSet::singleton(1.0);
  const double i0 = kExp.kl(2.0, 1.0);
  const TabulatedFn pflat = optimizer_from(TabulatedFn::constant(lambda, i0), kExp, simple);
  CHECK(pflat(1.0) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS(optimizer_from(TabulatedFn::constant(lambda, 1.0), kExp,
                              ParamSet::interval(-1.0, 1.0)));
}

TEST_CASE("pair_close matches the dense-grid fixed point") {
  const ParamSet theta = ParamSet::interval(0.8, 1.0, 256);
  const ParamSet lambda = ParamSet::interval(2.0, 3.0, 256);
  const TabulatedFn p = optimizer_from(TabulatedFn::constant(lambda, 1.0), kExp, theta);
  const OptimizerPair pair = pair_close(p, kExp, lambda);

  // Oracle: inf over a 10^4-point theta grid of I(lambda,theta)/p(theta).
  auto q_ref = [&](double lam) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10000; ++i) {
      const double t = 0.8 + 0.2 * i / 9999.0;
      best = std::min(best, kExp.kl(lam, t) / kExp.kl(2.0, t));
    }
    return best;
  };
  for (double lam : {2.0, 2.3, 2.7, 3.0}) {
    CHECK(pair.eval_q(lam) == doctest::Approx(q_ref(lam)).epsilon(1e-5));
    // The infimum binds at the low rate endpoint.
    CHECK(pair.eval_q(lam) ==
          doctest::Approx(kExp.kl(lam, 0.8) / kExp.kl(2.0, 0.8)).epsilon(1e-5));
  }
  CHECK(pair.residual < 1e-4);

  // Singleton post-change set: q collapses to 1 up to tabulation error.
  const ParamSet lam_pt = ParamSet::singleton(2.0);
  const TabulatedFn p2 = optimizer_from(TabulatedFn::constant(lam_pt, 1.0), kExp, theta);
  const OptimizerPair pair2 = pair_close(p2, kExp, lam_pt);
  CHECK(pair2.eval_q(2.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(pair2.residual < 1e-5);

  // A non-optimizer p must be rejected.
  CHECK_THROWS_AS(pair_close(TabulatedFn::constant(theta, 1.0), kExp, lambda), PairError);
}

TEST_CASE("verify_pair reports without throwing") {
  const ParamSet theta = ParamSet::interval(0.8, 1.0, 256);
  const ParamSet lambda = ParamSet::interval(2.0, 3.0, 256);
  const TabulatedFn p = optimizer_from(TabulatedFn::constant(lambda, 1.0), kExp, theta);
  const OptimizerPair pair = pair_close(p, kExp, lambda);
  const PairVerification ok = verify_pair(pair, kExp, theta, lambda, 1e-3);
  CHECK(ok.pass);
  CHECK(ok.residual < 1e-3);

  // p = 1 with q(lambda) = inf_theta I: not a fixed point of the first
  // equation on these sets.
  OptimizerPair bad = OptimizerPair::from_functions(
      [](double) { return 1.0; }, [&](double lam) { return kExp.kl(lam, 1.0); }, theta, lambda);
  const PairVerification rep = verify_pair(bad, kExp, theta, lambda, 1e-3);
  CHECK_FALSE(rep.pass);
  CHECK(rep.residual > 0.1);
}

TEST_CASE("normal beta pairs") {
  CHECK(beta_pair_coefficient(1.0) == doctest::Approx(2.0));
  CHECK(beta_pair_coefficient(0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(beta_pair_coefficient(0.49), std::invalid_argument);

  const ParamSet theta = ParamSet::interval(-2.0, -0.5, 128);
  const ParamSet lambda = ParamSet::interval(0.5, 2.0, 128);
  const OptimizerPair b1 = normal_beta_pair(1.0, theta, lambda);
  CHECK(b1.eval_p(-1.0) == doctest::Approx(2.0));
  CHECK(b1.eval_p(-0.75) == doctest::Approx(1.5));
  CHECK(b1.eval_q(1.3) == doctest::Approx(1.3));

  // Closed forms satisfy the fixed point to float accuracy on matched windows.
  const PairVerification v = verify_pair(b1, kNormal, theta, lambda, 1e-6);
  CHECK(v.pass);

  const OptimizerPair bh = normal_beta_pair(0.5, theta, lambda);
  CHECK(bh.eval_p(-1.7) == doctest::Approx(0.5));
  CHECK(bh.eval_q(1.4) == doctest::Approx(1.96));

  CHECK_THROWS_AS(normal_beta_pair(0.2, theta, lambda), std::invalid_argument);
  CHECK_THROWS_AS(normal_beta_pair(1.0, ParamSet::interval(0.5, 1.0), lambda),
                  std::invalid_argument);
}

TEST_CASE("efficiency values and bound") {
  const ParamSet theta = ParamSet::interval(-2.0, -0.5, 128);
  const ParamSet lambda = ParamSet::interval(0.5, 2.0, 128);
  const OptimizerPair b1 = normal_beta_pair(1.0, theta, lambda);
  CHECK(efficiency(b1, kNormal, -1.0, 1.0) == doctest::Approx(1.0));
  CHECK(efficiency(b1, kNormal, -2.0, 1.0) == doctest::Approx(8.0 / 9.0));

  // Matched curve theta = -(2 beta - 1) lambda, and the global <= 1 bound.
  for (double beta : {0.75, 1.0, 1.5}) {
    const OptimizerPair pb = normal_beta_pair(beta, theta, lambda);
    const double k = 2.0 * beta - 1.0;
    for (double lam : {0.6, 1.0, 1.9}) {
      const double th = -k * lam;
      if (th >= theta.lo && th <= theta.hi)
        CHECK(efficiency(pb, kNormal, th, lam) == doctest::Approx(1.0).epsilon(1e-10));
    }
    for (double th : theta.grid(17))
      for (double lam : lambda.grid(17))
        CHECK(efficiency(pb, kNormal, th, lam) <= 1.0 + 1e-6);
  }

  // Exponential pair: matched at lambda = 2 for every theta, and at
  // theta = 0.8 for every lambda.
  const ParamSet th_e = ParamSet::interval(0.8, 1.0, 256);
  const ParamSet la_e = ParamSet::interval(2.0, 3.0, 256);
  const OptimizerPair pe =
      pair_close(optimizer_from(TabulatedFn::constant(la_e, 1.0), kExp, th_e), kExp, la_e);
  CHECK(efficiency(pe, kExp, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-4));
  for (double t : th_e.grid(9))
    CHECK(efficiency(pe, kExp, t, 2.0) == doctest::Approx(1.0).epsilon(1e-4));
  for (double lam : la_e.grid(9)) {
    CHECK(efficiency(pe, kExp, 0.8, lam) == doctest::Approx(1.0).epsilon(1e-4));
    for (double t : th_e.grid(9)) CHECK(efficiency(pe, kExp, t, lam) <= 1.0 + 1e-6);
  }
}

TEST_CASE("pair maps are idempotent and homogeneous") {
  const ParamSet theta = ParamSet::interval(0.8, 1.0, 256);
  const ParamSet lambda = ParamSet::interval(2.0, 3.0, 256);
  const TabulatedFn q0 = TabulatedFn::constant(lambda, 1.0);
  const TabulatedFn p1 = optimizer_from(q0, kExp, theta);
  const OptimizerPair pr1 = pair_close(p1, kExp, lambda);

  const TabulatedFn p2 = optimizer_from(pr1.q, kExp, theta);
  const OptimizerPair pr2 = pair_close(p2, kExp, lambda);
  for (double t : theta.grid(33)) CHECK(p2(t) == doctest::Approx(p1(t)).epsilon(1e-6));
  for (double lam : lambda.grid(33))
    CHECK(pr2.q(lam) == doctest::Approx(pr1.q(lam)).epsilon(1e-6));

  // Scaling q0 by c scales p by 1/c and leaves the closed product invariant.
  const TabulatedFn p_scaled = optimizer_from(TabulatedFn::constant(lambda, 3.0), kExp, theta);
  const OptimizerPair pr_scaled = pair_close(p_scaled, kExp, lambda);
  for (double t : theta.grid(17))
    CHECK(p_scaled(t) == doctest::Approx(p1(t) / 3.0).epsilon(1e-10));
  for (double t : {0.8, 0.9, 1.0})
    for (double lam : {2.0, 2.5, 3.0})
      CHECK(p_scaled(t) * pr_scaled.q(lam) ==
            doctest::Approx(p1(t) * pr1.q(lam)).epsilon(1e-8));
}

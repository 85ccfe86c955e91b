#include <cmath>
#include <cstring>
#include <memory>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "seqdet/detector.hpp"

using namespace seqdet;
using seqdet::test::mixed_path;
using seqdet::test::sample_path;

namespace {

const Family kNormal = Family::normal_mean_unit_var();
const Family kExp = Family::exponential_rate();

DetectorConfig base_cusum(double theta, double lambda, double a) {
  DetectorConfig c;
  c.procedure = Procedure::cusum;
  c.family = kNormal;
  c.theta = ParamSet::singleton(theta);
  c.lambda = ParamSet::singleton(lambda);
  c.a = a;
  return c;
}

std::shared_ptr<const OptimizerPair> flat_pair(const ParamSet& theta, const ParamSet& lambda) {
  return std::make_shared<const OptimizerPair>(OptimizerPair::from_functions(
      [](double) { return 1.0; }, [](double) { return 1.0; }, theta, lambda));
}

std::shared_ptr<const OptimizerPair> exp_pair(const ParamSet& theta, const ParamSet& lambda) {
  const TabulatedFn p = optimizer_from(TabulatedFn::constant(lambda, 1.0), kExp, theta);
  return std::make_shared<const OptimizerPair>(pair_close(p, kExp, lambda));
}

}  // namespace

TEST_CASE("procedure names round trip") {
  for (Procedure p :
       {Procedure::cusum, Procedure::m_star, Procedure::m_hat_star, Procedure::tau_glr,
        Procedure::t_hat_star_glr, Procedure::t_star_mixture, Procedure::t_beta_star,
        Procedure::t_zero_star, Procedure::open_m})
    CHECK(procedure_from_string(to_string(p)) == p);
  CHECK(procedure_from_string("t_hat_star") == Procedure::t_hat_star_glr);
  CHECK(procedure_from_string("t_star") == Procedure::t_star_mixture);
  CHECK_THROWS_AS(procedure_from_string("nonsense"), ConfigError);
}

TEST_CASE("page recursion hand example") {
  // llr(x) = x - 1/2, so the increments are 0.5, -0.2, 0.3 and the recursion
  // visits 0.5, 0.3, 0.6.
  const DetectorConfig c = base_cusum(0.0, 1.0, 0.55);
  auto det = make_detector(c);
  StepOutcome s1 = det->step(1.0);
  CHECK_FALSE(s1.alarm);
  CHECK(s1.statistic == doctest::Approx(0.5));
  StepOutcome s2 = det->step(0.3);
  CHECK_FALSE(s2.alarm);
  CHECK(s2.statistic == doctest::Approx(0.3));
  StepOutcome s3 = det->step(0.8);
  CHECK(s3.alarm);
  CHECK(s3.statistic == doctest::Approx(0.6));
  CHECK(std::strcmp(s3.branch, "recursion") == 0);

  const std::vector<double> xs{1.0, 0.3, 0.8};
  const AlarmReport r = run_detector(c, xs);
  CHECK(r.stopped);
  CHECK(r.n_stop == 3);
  CHECK_FALSE(r.censored);
  CHECK(r.statistic == doctest::Approx(0.6));
  CHECK(r.branch == "recursion");
}

TEST_CASE("zero threshold alarms on the first nonnegative increment") {
  const std::vector<double> flat{0.5};
  const AlarmReport r = run_detector(base_cusum(0.0, 1.0, 0.0), flat);
  CHECK(r.stopped);
  CHECK(r.n_stop == 1);
  CHECK(r.statistic == 0.0);

  // The recursion floors before adding, so the statistic itself can be
  // negative and a negative increment does not alarm even at a = 0.
  const std::vector<double> neg{-5.0};
  const AlarmReport rn = run_detector(base_cusum(0.0, 1.0, 0.0), neg);
  CHECK_FALSE(rn.stopped);
}

TEST_CASE("windowed two-branch detector hand examples") {
  DetectorConfig c;
  c.procedure = Procedure::m_star;
  c.family = kNormal;
  c.theta = ParamSet::interval(-1.0, -0.5);
  c.lambda = ParamSet::singleton(0.0);
  c.a = 2.0;

  // One observation at 1.0: the low-endpoint window sum is 1.5, above
  // I(0,-1) a = 1.0.
  const std::vector<double> one{1.0};
  const AlarmReport r = run_detector(c, one);
  CHECK(r.stopped);
  CHECK(r.n_stop == 1);
  CHECK(r.branch == "theta_lo_window");

  // Data pinned at the low pre-change mean never alarm at a realistic
  // threshold.
  c.a = 18.5;
  const std::vector<double> flat(10000, -1.0);
  const AlarmReport rf = run_detector(c, flat);
  CHECK_FALSE(rf.stopped);
  CHECK(rf.censored);
  CHECK(rf.n_stop == 10000);
}

TEST_CASE("lagged recursion gates on the window length") {
  DetectorConfig c;
  c.procedure = Procedure::m_hat_star;
  c.family = kNormal;
  c.theta = ParamSet::singleton(-0.5);
  c.lambda = ParamSet::singleton(0.0);
  c.a = 5.0;

  // Even a huge first observation cannot alarm before ceil(a) steps.
  auto det = make_detector(c);
  CHECK_FALSE(det->step(100.0).alarm);

  // At the pre-change boundary llr(0) = 0.125 per step and I a = 0.625, so
  // a stream of zeros alarms exactly when the five-term window fills.
  const std::vector<double> zeros(8, 0.0);
  const AlarmReport r = run_detector(c, zeros);
  CHECK(r.stopped);
  CHECK(r.n_stop == 5);
  CHECK(r.branch == "lagged");
  CHECK(r.statistic == doctest::Approx(0.625));

  c.family = kExp;
  c.theta = ParamSet::singleton(1.0);
  c.lambda = ParamSet::singleton(2.0);
  CHECK_THROWS_AS(make_detector(c), ConfigError);
}

TEST_CASE("power scan reductions") {
  DetectorConfig c;
  c.procedure = Procedure::t_beta_star;
  c.family = kNormal;
  c.theta = ParamSet::singleton(-0.5);
  c.lambda = ParamSet::singleton(0.5);
  c.beta = 1.0;
  c.a = 3.0;

  // beta = 1 collapses to the raw-sum recursion, which equals a page
  // recursion whose increments are the observations themselves.
  const DetectorConfig page = base_cusum(-0.5, 0.5, 3.0);
  for (std::uint64_t seed : {11u, 12u, 13u, 14u}) {
    const std::vector<double> xs = mixed_path(kNormal, -0.2, 0.45, 40, 400, seed);
    auto a = make_detector(c);
    auto b = make_detector(page);
    for (double x : xs) {
      const StepOutcome sa = a->step(x);
      const StepOutcome sb = b->step(x);
      CHECK(sa.statistic == doctest::Approx(sb.statistic).epsilon(1e-12));
      CHECK(sa.alarm == sb.alarm);
      if (sa.alarm) break;
    }
  }

  // All-ones stream with beta = 1/2: the best window of length m scores
  // sqrt(m), and the threshold is a^beta = 2.
  c.beta = 0.5;
  c.a = 4.0;
  const std::vector<double> ones(10, 1.0);
  const AlarmReport r = run_detector(c, ones);
  CHECK(r.stopped);
  CHECK(r.n_stop == 4);
  CHECK(r.branch == "power_scan");

  c.beta = 0.4;
  CHECK_THROWS_AS(make_detector(c), ConfigError);
  c.beta = 1.0;
  c.family = kExp;
  c.theta = ParamSet::singleton(1.0);
  c.lambda = ParamSet::singleton(2.0);
  CHECK_THROWS_AS(make_detector(c), ConfigError);
}

TEST_CASE("lagged minimum rule") {
  DetectorConfig c;
  c.procedure = Procedure::t_zero_star;
  c.family = kNormal;
  c.theta = ParamSet::singleton(-0.5);
  c.lambda = ParamSet::singleton(0.5);
  c.a = 3.0;

  const std::vector<double> ones(6, 1.0);
  const AlarmReport r = run_detector(c, ones);
  CHECK(r.stopped);
  CHECK(r.n_stop == 3);  // S_3 = 3 >= S_0 = 0 and the lag window just fills
  CHECK(r.branch == "lagged_min");

  const std::vector<double> down(1000, -1.0);
  const AlarmReport rd = run_detector(c, down);
  CHECK_FALSE(rd.stopped);

  c.family = kExp;
  c.theta = ParamSet::singleton(1.0);
  c.lambda = ParamSet::singleton(2.0);
  CHECK_THROWS_AS(make_detector(c), ConfigError);
}

TEST_CASE("open ended test switches endpoints at n = a") {
  DetectorConfig c;
  c.procedure = Procedure::open_m;
  c.family = kNormal;
  c.theta = ParamSet::interval(-1.0, -0.5);
  c.lambda = ParamSet::singleton(0.0);
  c.a = 2.0;

  // Early alarm through the low endpoint: llr_lo(x) = x + 1/2 against
  // threshold I(0,-1) a = 1.
  const std::vector<double> up{0.3, 0.7};
  const AlarmReport r = run_detector(c, up);
  CHECK(r.stopped);
  CHECK(r.n_stop == 2);
  CHECK(r.branch == "endpoint_lo");

  // Data that survive the first two steps but drift up under the high
  // endpoint: llr_hi(x) = 0.5 x + 0.125 accumulates 0.075 per step against
  // threshold I(0,-1/2) a = 0.25.
  const std::vector<double> slow(10, -0.1);
  const AlarmReport rs = run_detector(c, slow);
  CHECK(rs.stopped);
  CHECK(rs.n_stop == 4);
  CHECK(rs.branch == "endpoint_hi");
}

TEST_CASE("page recursion alarms weakly earlier at lower pre-change parameters") {
  // If the recursion at theta' crosses a > 0 on some window, the same window
  // crosses for every theta <= theta', so stopping times are ordered.
  auto stop_at = [](const DetectorConfig& c, const std::vector<double>& xs) {
    const AlarmReport r = run_detector(c, xs);
    return r.stopped ? r.n_stop : std::numeric_limits<std::int64_t>::max();
  };
  for (std::uint64_t seed = 50; seed < 80; ++seed) {
    const std::vector<double> xn = mixed_path(kNormal, -0.7, 0.5, 20, 250, seed);
    CHECK(stop_at(base_cusum(-1.0, 0.5, 2.0), xn) <= stop_at(base_cusum(-0.75, 0.5, 2.0), xn));
    CHECK(stop_at(base_cusum(-0.75, 0.5, 2.0), xn) <= stop_at(base_cusum(-0.5, 0.5, 2.0), xn));

    // For the rate family the post-change natural parameter lies below the
    // pre-change one, so the transfer argument mirrors: crossings propagate
    // toward naturals farther above lambda, that is, toward smaller rates.
    DetectorConfig e;
    e.family = kExp;
    e.lambda = ParamSet::singleton(2.0);
    e.a = 2.5;
    const std::vector<double> xe = mixed_path(kExp, 0.9, 2.1, 20, 250, seed + 1000);
    e.theta = ParamSet::singleton(0.7);
    const auto lo = stop_at(e, xe);
    e.theta = ParamSet::singleton(1.0);
    CHECK(lo <= stop_at(e, xe));
  }
}

TEST_CASE("glr with a singleton post-change set matches the page recursion") {
  DetectorConfig glr;
  glr.procedure = Procedure::tau_glr;
  glr.family = kExp;
  glr.theta = ParamSet::singleton(0.8);
  glr.lambda = ParamSet::singleton(2.0);
  glr.a = 3.0;

  DetectorConfig page = glr;
  page.procedure = Procedure::cusum;

  for (std::uint64_t seed : {21u, 22u, 23u, 24u, 25u}) {
    const std::vector<double> xs = mixed_path(kExp, 0.9, 2.2, 30, 400, seed);
    const AlarmReport rg = run_detector(glr, xs);
    const AlarmReport rp = run_detector(page, xs);
    CHECK(rg.stopped == rp.stopped);
    CHECK(rg.n_stop == rp.n_stop);
  }
}

TEST_CASE("flat boundary scaling degenerates to the page recursion") {
  // With p = 1 and a singleton post-change set, the scaled GLR procedure
  // stops exactly when a page recursion at the near pre-change endpoint
  // stops.
  const ParamSet theta = ParamSet::interval(-1.0, -0.5);
  const ParamSet lambda = ParamSet::singleton(0.5);

  DetectorConfig t;
  t.procedure = Procedure::t_hat_star_glr;
  t.family = kNormal;
  t.theta = theta;
  t.lambda = lambda;
  t.a = 2.2;
  t.pair = flat_pair(theta, lambda);
  t.require_verified_pair = false;

  const DetectorConfig page = base_cusum(-0.5, 0.5, 2.2);

  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    const std::vector<double> xs = mixed_path(kNormal, -0.7, 0.6, 25, 300, seed);
    const AlarmReport rt = run_detector(t, xs);
    const AlarmReport rp = run_detector(page, xs);
    CHECK(rt.stopped == rp.stopped);
    CHECK(rt.n_stop == rp.n_stop);
  }
}

TEST_CASE("mixture never alarms before the glr scan") {
  const ParamSet theta = ParamSet::interval(0.8, 1.0, 256);
  const ParamSet lambda = ParamSet::interval(2.0, 3.0, 256);
  const auto pair = exp_pair(theta, lambda);

  DetectorConfig hat;
  hat.procedure = Procedure::t_hat_star_glr;
  hat.family = kExp;
  hat.theta = theta;
  hat.lambda = lambda;
  hat.a = 2.0;
  hat.pair = pair;

  DetectorConfig mix = hat;
  mix.procedure = Procedure::t_star_mixture;

  for (std::uint64_t seed = 300; seed < 340; ++seed) {
    const std::vector<double> xs = mixed_path(kExp, 0.9, 2.4, 40, 500, seed);
    const AlarmReport rh = run_detector(hat, xs);
    const AlarmReport rm = run_detector(mix, xs);
    if (rm.stopped) {
      REQUIRE(rh.stopped);
      CHECK(rh.n_stop <= rm.n_stop);
    }
  }
}

TEST_CASE("bounded detectors hold a constant state size once warmed") {
  DetectorConfig m;
  m.procedure = Procedure::m_star;
  m.family = kNormal;
  m.theta = ParamSet::interval(-1.0, -0.5);
  m.lambda = ParamSet::singleton(0.0);
  m.a = 60.5;

  DetectorConfig mh = m;
  mh.procedure = Procedure::m_hat_star;
  mh.theta = ParamSet::singleton(-0.5);

  DetectorConfig tz = m;
  tz.procedure = Procedure::t_zero_star;
  tz.theta = ParamSet::singleton(-0.5);
  tz.lambda = ParamSet::singleton(0.5);

  const std::vector<double> xs = sample_path(kNormal, -0.6, 2000, 7);
  for (const DetectorConfig& c : {base_cusum(0.0, 1.0, 50.0), m, mh, tz}) {
    auto det = make_detector(c);
    std::size_t warmed = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      det->step(xs[i]);
      if (i == 500) warmed = det->state_size();
    }
    CHECK(det->state_size() == warmed);
    CHECK(warmed > 0);
  }
}

TEST_CASE("clone and reset reproduce streams") {
  const ParamSet theta = ParamSet::interval(0.8, 1.0, 256);
  const ParamSet lambda = ParamSet::interval(2.0, 3.0, 256);

  DetectorConfig c;
  c.procedure = Procedure::t_hat_star_glr;
  c.family = kExp;
  c.theta = theta;
  c.lambda = lambda;
  c.a = 30.0;
  c.pair = exp_pair(theta, lambda);

  const std::vector<double> head = sample_path(kExp, 0.9, 50, 41);
  const std::vector<double> tail = sample_path(kExp, 2.1, 50, 42);

  // Fast-path steps may not evaluate a statistic; both sides must then agree
  // on not having one.
  auto same_stat = [](double a, double b) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
  };

  auto det = make_detector(c);
  for (double x : head) det->step(x);
  auto copy = det->clone();
  CHECK(copy->steps() == det->steps());
  for (double x : tail) {
    const StepOutcome a = det->step(x);
    const StepOutcome b = copy->step(x);
    CHECK(same_stat(a.statistic, b.statistic));
    CHECK(a.alarm == b.alarm);
  }

  det->reset();
  CHECK(det->steps() == 0);
  auto fresh = make_detector(c);
  for (double x : head) CHECK(same_stat(det->step(x).statistic, fresh->step(x).statistic));
}

TEST_CASE("configuration validation") {
  // Negative threshold.
  DetectorConfig c = base_cusum(0.0, 1.0, -0.5);
  CHECK_THROWS_AS(make_detector(c), ConfigError);

  // Procedures that scan thresholds need a strictly positive one.
  c = base_cusum(-0.5, 0.5, 0.0);
  c.procedure = Procedure::t_beta_star;
  CHECK_THROWS_AS(make_detector(c), ConfigError);

  // Pre- and post-change sets must be separated.
  c = base_cusum(1.0, 1.0, 2.0);
  CHECK_THROWS_AS(make_detector(c), ConfigError);
  c = base_cusum(0.0, 1.0, 2.0);
  c.theta = ParamSet::interval(-1.0, -0.5);
  c.lambda = ParamSet::interval(-0.5, 0.0);
  c.procedure = Procedure::m_star;
  CHECK_THROWS_AS(make_detector(c), ConfigError);

  // Scaled procedures require a pair, and a verified one by default.
  DetectorConfig t;
  t.procedure = Procedure::t_hat_star_glr;
  t.family = kExp;
  t.theta = ParamSet::interval(0.8, 1.0);
  t.lambda = ParamSet::interval(2.0, 3.0);
  t.a = 5.0;
  CHECK_THROWS_AS(make_detector(t), ConfigError);

  t.pair = std::make_shared<const OptimizerPair>(OptimizerPair::from_functions(
      [](double) { return 1.0; }, [](double) { return 1.0; }, t.theta, t.lambda, 0.02));
  CHECK_THROWS_AS(make_detector(t), ConfigError);
  t.require_verified_pair = false;
  CHECK_NOTHROW(make_detector(t));

  // Mixture node count.
  t.procedure = Procedure::t_star_mixture;
  t.eta_grid_n = 0;
  CHECK_THROWS_AS(make_detector(t), ConfigError);
  t.eta_grid_n = 1;
  CHECK_THROWS_AS(make_detector(t), ConfigError);
  t.allow_single_eta_node = true;
  CHECK_NOTHROW(make_detector(t));

  // Family domain violations surface through the parameter sets.
  DetectorConfig e = base_cusum(0.0, 1.0, 2.0);
  e.family = kExp;
  CHECK_THROWS(make_detector(e));
}

TEST_CASE("run_detector reporting") {
  const DetectorConfig c = base_cusum(0.0, 1.0, 5.0);
  CHECK_THROWS_AS(run_detector(c, std::span<const double>{}), ConfigError);

  const std::vector<double> flat(100, -1.0);
  const AlarmReport capped = run_detector(c, flat, 10);
  CHECK_FALSE(capped.stopped);
  CHECK(capped.censored);
  CHECK(capped.n_stop == 10);

  const std::vector<double> Short(7, -1.0);
  const AlarmReport drained = run_detector(c, Short);
  CHECK_FALSE(drained.stopped);
  CHECK(drained.censored);
  CHECK(drained.n_stop == 7);

  const std::vector<double> hot(100, 2.0);
  const AlarmReport fired = run_detector(c, hot, 50);
  CHECK(fired.stopped);
  CHECK_FALSE(fired.censored);
  CHECK(fired.statistic >= c.a);
  CHECK(fired.n_stop == 4);  // increments of 1.5 reach 5 on the fourth step
}

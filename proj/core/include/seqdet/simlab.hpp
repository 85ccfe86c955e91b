#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "seqdet/detector.hpp"

namespace seqdet {

// Deterministic substream derivation: replication r of master seed s draws
// from mt19937_64 seeded with two rounds of splitmix64 over (s, r). Same
// (s, r) reproduces the observation sequence bit-identically for any thread
// layout (sampling distributions fixed by the standard library in use).
struct SeedScheme {
  std::uint64_t master = 0;

  std::uint64_t substream(std::uint64_t rep) const;
  std::mt19937_64 rng(std::uint64_t rep) const { return std::mt19937_64(substream(rep)); }
};

struct ArlEstimate {
  double mean = 0.0;
  double se = 0.0;          // sample sd / sqrt(count), uncensored runs only
  std::int64_t reps = 0;    // replications attempted
  std::int64_t censored = 0;
  std::int64_t horizon = 0;
};

enum class CalibMode { delay, long_arl };

struct CalibrationResult {
  double a = 0.0;
  ArlEstimate achieved;
  double target = 0.0;
  CalibMode mode = CalibMode::delay;
};

struct CalibrationRangeError : std::range_error {
  using std::range_error::range_error;
};

// Mean stop time under i.i.d. f_theta observations (no change ever happens).
// Runs exceeding `horizon` are censored: counted, never averaged in.
ArlEstimate estimate_long_arl(const DetectorConfig& config, double theta_true,
                              std::int64_t reps, std::int64_t horizon, const SeedScheme& seeds,
                              int threads = 0);

// Mean alarm time with the change at the first observation and the detector
// in its reset state (worst case for these restart-style statistics).
ArlEstimate estimate_delay(const DetectorConfig& config, double lambda_true, std::int64_t reps,
                           const SeedScheme& seeds, std::int64_t horizon = 1'000'000,
                           int threads = 0);

// Bracketing search plus bisection on the threshold a under common random
// numbers. The returned estimate satisfies
//   |achieved.mean - target| <= max(3 * achieved.se, rel_tol * target),
// else a CalibrationRangeError is thrown (also when [a_lo, a_hi] fails to
// bracket the target).
CalibrationResult calibrate_threshold(DetectorConfig config_template, CalibMode mode,
                                      double target, double at_param, std::int64_t reps,
                                      const SeedScheme& seeds, double rel_tol = 0.02,
                                      double a_lo = 0.05, double a_hi = 500.0,
                                      int threads = 0);

struct AsymptoticPrediction {
  double c = 0.0;          // two-endpoint constant
  double c_half_open = 0.0;
  double predicted = 0.0;            // a + c * sqrt(a)
  double predicted_half_open = 0.0;  // a + c_half_open * sqrt(a)
};

// First-order delay expansion a + C sqrt(a) for the one-shot open-ended test,
// with C = ((lambda-theta1)/I(lambda,theta1) - (lambda-theta0)/I(lambda,theta0))
//          * sqrt(b''(xi_lambda) / (2 pi)).
// Requires theta0 <= theta1 < lambda.
AsymptoticPrediction asymptotic_delay_prediction(const Family& f, double theta0, double theta1,
                                                 double lambda, double a);

struct WaldBoundReport {
  double fraction = 0.0;  // open-ended runs alarming within horizon
  double bound = 0.0;     // exp(-I(lambda, theta) * a)
  double binom_se = 0.0;
  bool pass = false;
  std::int64_t reps = 0;
};

// MC check of P_theta(one-shot test ever stops) <= exp(-I(lambda,theta) a).
// Truncation at `horizon` only lowers the observed fraction, so the check is
// conservative.
WaldBoundReport wald_bound_check(const Family& f, const ParamSet& theta_set, double lambda,
                                 double a, double theta, std::int64_t reps, std::int64_t horizon,
                                 const SeedScheme& seeds, int threads = 0);

struct LowerBoundReport {
  double bound = 0.0;  // exp(p_at * a)
  double mean_plus_3se = 0.0;
  bool pass = false;
};

// Long-ARL lower bound exp(p_at * a): p_at = I(lambda, theta) for the
// windowed variant, p(theta) for the scaled GLR/mixture rules.
LowerBoundReport lower_bound_check(const ArlEstimate& long_arl, double a, double p_at);

// Largest t >= 0 with E_theta exp(t * llr(lambda_cfg, theta_cfg, X)) <= 1;
// exp(t a) then lower-bounds the single-parameter recursion's long ARL when
// the truth is theta_true. Returns 0 when the increment drift is nonnegative
// (the bound degenerates to 1).
double crossing_exponent(const Family& f, double theta_true, double theta_cfg,
                         double lambda_cfg);

}  // namespace seqdet

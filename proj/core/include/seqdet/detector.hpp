#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

#include "seqdet/family.hpp"
#include "seqdet/optimizer_pair.hpp"
#include "seqdet/param_set.hpp"

namespace seqdet {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class Procedure {
  cusum,            // Page recursion at a single pre-change parameter
  m_star,           // windowed two-branch variant with restart
  m_hat_star,       // half-open pre-change set, lagged recursion
  tau_glr,          // generalized likelihood ratio, simple pre-change point
  t_hat_star_glr,   // GLR over both sets, scaled by p(theta)
  t_star_mixture,   // mixture over a post-change grid, scaled by p(theta)
  t_beta_star,      // normal-mean power-weighted scan
  t_zero_star,      // normal-mean lagged-minimum rule
  open_m,           // open-ended one-shot test (no restart)
};

Procedure procedure_from_string(const std::string& s);
std::string to_string(Procedure p);

struct DetectorConfig {
  Procedure procedure = Procedure::cusum;
  Family family = Family::normal_mean_unit_var();
  ParamSet theta = ParamSet::singleton(0.0);   // pre-change set
  ParamSet lambda = ParamSet::singleton(1.0);  // post-change set
  double a = 1.0;                              // threshold; alarms fire on >=
  std::shared_ptr<const OptimizerPair> pair;   // required by t_hat_star_glr / t_star_mixture
  double beta = 1.0;                           // t_beta_star exponent
  int eta_grid_n = 33;                         // t_star_mixture node count

  // Construction enforces pair.residual <= pair_residual_tol unless disabled;
  // disabling is the escape hatch for flat-boundary (p == 1) experiments.
  bool require_verified_pair = true;
  double pair_residual_tol = 1e-3;

  // Testing escape hatches, not part of the stable surface.
  bool closed_form_sup = true;          // false: golden-section inner supremum
  bool allow_single_eta_node = false;   // permit eta_grid_n == 1
};

struct StepOutcome {
  bool alarm = false;
  const char* branch = "";
  double statistic = std::numeric_limits<double>::quiet_NaN();
};

struct AlarmReport {
  bool stopped = false;
  std::int64_t n_stop = 0;  // 1-based alarm step; observations consumed when censored
  std::string branch;
  double statistic = std::numeric_limits<double>::quiet_NaN();
  bool censored = false;
};

class Detector {
 public:
  virtual ~Detector() = default;

  // Feed the next observation; n advances by one per call.
  virtual StepOutcome step(double x) = 0;
  virtual void reset() = 0;
  virtual std::unique_ptr<Detector> clone() const = 0;

  // Number of buffered scalars; bounded detectors keep this constant once
  // warmed up, which the tests assert.
  virtual std::size_t state_size() const = 0;

  std::int64_t steps() const { return n_; }

 protected:
  std::int64_t n_ = 0;
};

std::unique_ptr<Detector> make_detector(const DetectorConfig& config);

// Feeds observations until alarm, stream end, or max_steps (<= 0: no cap).
// An empty stream is a configuration error.
AlarmReport run_detector(const DetectorConfig& config, std::span<const double> xs,
                         std::int64_t max_steps = 0);
AlarmReport run_detector(Detector& det, std::span<const double> xs, std::int64_t max_steps = 0);

}  // namespace seqdet

#pragma once

#include <functional>
#include <stdexcept>

#include "seqdet/family.hpp"
#include "seqdet/param_set.hpp"
#include "seqdet/tabulated_fn.hpp"

namespace seqdet {

struct PairError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A boundary-scaling pair (p on the pre-change set, q on the post-change set)
// satisfying the mutual fixed point
//   p(theta) = inf_lambda I(lambda, theta) / q(lambda)
//   q(lambda) = inf_theta I(lambda, theta) / p(theta).
// Tabulations always exist; exact closed forms, when present, take precedence
// during evaluation so that analytically known pairs carry no interpolation
// error.
struct OptimizerPair {
  TabulatedFn p;
  TabulatedFn q;
  std::function<double(double)> p_exact;  // optional
  std::function<double(double)> q_exact;  // optional
  double residual = 0.0;

  double eval_p(double theta) const { return p_exact ? p_exact(theta) : p(theta); }
  double eval_q(double lambda) const { return q_exact ? q_exact(lambda) : q(lambda); }

  static OptimizerPair from_functions(std::function<double(double)> p_fn,
                                      std::function<double(double)> q_fn,
                                      const ParamSet& theta_window,
                                      const ParamSet& lambda_window, double residual = 0.0);
};

// p(theta) = inf over q0's window of I(lambda, theta)/q0(lambda), tabulated on
// theta's grid. The infimum scans q0's nodes and refines by golden section.
TabulatedFn optimizer_from(const TabulatedFn& q0, const Family& f, const ParamSet& theta);

// Companion q for a given p, with a fixed-point residual check on the
// construction grids. Throws PairError when the residual exceeds tol
// (p was not an optimizer, or the grids are too coarse).
OptimizerPair pair_close(const TabulatedFn& p, const Family& f, const ParamSet& lambda,
                         double tol = 1e-3);

struct PairVerification {
  double residual_p = 0.0;
  double residual_q = 0.0;
  double residual = 0.0;
  bool pass = false;
};

// Re-checks both fixed-point equations on grids 4x denser than the pair's own
// tabulations, restricted to the supplied windows.
PairVerification verify_pair(const OptimizerPair& pair, const Family& f, const ParamSet& theta,
                             const ParamSet& lambda, double tol = 1e-3);

// Closed-form pair for the normal mean family on truncated windows:
//   p(theta) = k_beta |theta|^(2 - 1/beta) on theta < 0,
//   q(lambda) = lambda^(1/beta)          on lambda > 0,
// k_beta = 2 beta^2 (2 beta - 1)^(1/beta - 2), beta >= 1/2.
OptimizerPair normal_beta_pair(double beta, const ParamSet& theta_window,
                               const ParamSet& lambda_window);

double beta_pair_coefficient(double beta);

// e(theta, lambda) = p(theta) q(lambda) / I(lambda, theta), always <= 1 for a
// true optimizer pair, with equality on the matched curve.
double efficiency(const OptimizerPair& pair, const Family& f, double theta, double lambda);

}  // namespace seqdet

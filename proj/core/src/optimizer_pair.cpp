#include "seqdet/optimizer_pair.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seqdet/optimize.hpp"

namespace seqdet {

namespace {

double inf_over_window(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (lo == hi) return f(lo);
  return grid_golden_min(f, lo, hi, n).value;
}

// inf over lambda of I(lambda, theta) / q(lambda)
double p_equation(const Family& f, const OptimizerPair& pair, double lo, double hi, int n,
                  double theta) {
  return inf_over_window([&](double l) { return f.kl(l, theta) / pair.eval_q(l); }, lo, hi, n);
}

// inf over theta of I(lambda, theta) / p(theta)
double q_equation(const Family& f, const OptimizerPair& pair, double lo, double hi, int n,
                  double lambda) {
  return inf_over_window([&](double t) { return f.kl(lambda, t) / pair.eval_p(t); }, lo, hi, n);
}

}  // namespace

OptimizerPair OptimizerPair::from_functions(std::function<double(double)> p_fn,
                                            std::function<double(double)> q_fn,
                                            const ParamSet& theta_window,
                                            const ParamSet& lambda_window, double residual) {
  OptimizerPair pair{TabulatedFn::sample(theta_window, p_fn),
                     TabulatedFn::sample(lambda_window, q_fn), std::move(p_fn), std::move(q_fn),
                     residual};
  return pair;
}

TabulatedFn optimizer_from(const TabulatedFn& q0, const Family& f, const ParamSet& theta) {
  theta.validate(f);
  if (!f.user_in_domain(q0.lo()) || !f.user_in_domain(q0.hi()))
    throw std::invalid_argument("optimizer_from: q0 window outside family domain");
  const int scan_n = static_cast<int>(std::max<std::size_t>(q0.size(), 2));
  return TabulatedFn::sample(theta, [&](double t) {
    return inf_over_window([&](double l) { return f.kl(l, t) / q0(l); }, q0.lo(), q0.hi(), scan_n);
  });
}

OptimizerPair pair_close(const TabulatedFn& p, const Family& f, const ParamSet& lambda,
                         double tol) {
  lambda.validate(f);
  const int scan_n = static_cast<int>(std::max<std::size_t>(p.size(), 2));
  TabulatedFn q = TabulatedFn::sample(lambda, [&](double l) {
    return inf_over_window([&](double t) { return f.kl(l, t) / p(t); }, p.lo(), p.hi(), scan_n);
  });

  OptimizerPair pair{p, std::move(q), nullptr, nullptr, 0.0};

  double residual = 0.0;
  for (double t : pair.p.xs()) {
    const double rhs =
        p_equation(f, pair, pair.q.lo(), pair.q.hi(), static_cast<int>(pair.q.size()), t);
    residual = std::max(residual, std::abs(pair.p(t) - rhs) / pair.p(t));
  }
  for (double l : pair.q.xs()) {
    const double rhs =
        q_equation(f, pair, pair.p.lo(), pair.p.hi(), static_cast<int>(pair.p.size()), l);
    residual = std::max(residual, std::abs(pair.q(l) - rhs) / pair.q(l));
  }
  pair.residual = residual;
  if (!(residual <= tol)) {
    std::ostringstream os;
    os << "pair_close: fixed-point residual " << residual << " exceeds tolerance " << tol
       << " (p is not an optimizer, or grids are too coarse)";
    throw PairError(os.str());
  }
  return pair;
}

PairVerification verify_pair(const OptimizerPair& pair, const Family& f, const ParamSet& theta,
                             const ParamSet& lambda, double tol) {
  theta.validate(f);
  lambda.validate(f);
  const int tn = 4 * theta.grid_n;
  const int ln = 4 * lambda.grid_n;

  PairVerification v;
  for (double t : theta.grid(tn)) {
    const double lhs = pair.eval_p(t);
    const double rhs = p_equation(f, pair, lambda.lo, lambda.hi, ln, t);
    v.residual_p = std::max(v.residual_p, std::abs(lhs - rhs) / lhs);
  }
  for (double l : lambda.grid(ln)) {
    const double lhs = pair.eval_q(l);
    const double rhs = q_equation(f, pair, theta.lo, theta.hi, tn, l);
    v.residual_q = std::max(v.residual_q, std::abs(lhs - rhs) / lhs);
  }
  v.residual = std::max(v.residual_p, v.residual_q);
  v.pass = v.residual <= tol;
  return v;
}

double beta_pair_coefficient(double beta) {
  if (!(beta >= 0.5)) throw std::invalid_argument("beta must be >= 1/2");
  const double e = 1.0 / beta - 2.0;
  const double base = 2.0 * beta - 1.0;
  const double factor = (e == 0.0) ? 1.0 : std::pow(base, e);
  return 2.0 * beta * beta * factor;
}

OptimizerPair normal_beta_pair(double beta, const ParamSet& theta_window,
                               const ParamSet& lambda_window) {
  if (!(beta >= 0.5)) throw std::invalid_argument("beta must be >= 1/2");
  if (!(theta_window.hi < 0.0))
    throw std::invalid_argument("normal_beta_pair: theta window must lie in (-inf, 0)");
  if (!(lambda_window.lo > 0.0))
    throw std::invalid_argument("normal_beta_pair: lambda window must lie in (0, inf)");
  const double k = beta_pair_coefficient(beta);
  const double p_pow = 2.0 - 1.0 / beta;
  const double q_pow = 1.0 / beta;
  return OptimizerPair::from_functions(
      [k, p_pow](double t) { return k * std::pow(std::abs(t), p_pow); },
      [q_pow](double l) { return std::pow(l, q_pow); }, theta_window, lambda_window, 0.0);
}

double efficiency(const OptimizerPair& pair, const Family& f, double theta, double lambda) {
  return pair.eval_p(theta) * pair.eval_q(lambda) / f.kl(lambda, theta);
}

}  // namespace seqdet

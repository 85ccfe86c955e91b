#include "seqdet/detector.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <vector>

#include "seqdet/optimize.hpp"

namespace seqdet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-observation log-likelihood ratio as slope * x - offset, precomputed in
// natural coordinates so the hot loops touch no Family machinery.
struct LlrCoef {
  double slope = 0.0;
  double offset = 0.0;
  double operator()(double x) const { return slope * x - offset; }
};

LlrCoef llr_coef(const Family& f, double lambda_user, double theta_user) {
  const double xl = f.natural(lambda_user);
  const double xt = f.natural(theta_user);
  return {xl - xt, f.cumulant(xl, 0) - f.cumulant(xt, 0)};
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void validate_common(const DetectorConfig& c, bool positive_a) {
  c.theta.validate(c.family);
  c.lambda.validate(c.family);
  require(std::isfinite(c.a), "threshold a must be finite");
  require(positive_a ? c.a > 0.0 : c.a >= 0.0,
          positive_a ? "threshold a must be positive" : "threshold a must be nonnegative");
}

void validate_separated(const DetectorConfig& c) {
  require(min_kl_on_grid(c.family, c.theta, c.lambda) > 0.0,
          "pre-change and post-change sets must be separated (KL > 0 on the product grid)");
}

void validate_pair(const DetectorConfig& c) {
  require(static_cast<bool>(c.pair), to_string(c.procedure) + " requires an optimizer pair");
  if (c.require_verified_pair)
    require(c.pair->residual <= c.pair_residual_tol,
            "optimizer pair unverified: residual exceeds tolerance");
  for (double t : c.theta.grid(9))
    require(c.pair->eval_p(t) > 0.0, "p(theta) must be positive on the pre-change set");
}

// theta endpoint naturals sorted, as [lo, hi] in natural coordinates.
struct NaturalInterval {
  double lo, hi;
};

NaturalInterval natural_interval(const Family& f, const ParamSet& s) {
  const double x1 = f.natural(s.lo);
  const double x2 = f.natural(s.hi);
  return {std::min(x1, x2), std::max(x1, x2)};
}

// ---------------------------------------------------------------- cusum ----

class CusumDetector final : public Detector {
 public:
  explicit CusumDetector(const DetectorConfig& c) : a_(c.a) {
    validate_common(c, /*positive_a=*/false);
    require(c.theta.is_singleton() && c.lambda.is_singleton(),
            "cusum needs singleton theta and lambda");
    validate_separated(c);
    coef_ = llr_coef(c.family, c.lambda.lo, c.theta.lo);
  }

  StepOutcome step(double x) override {
    ++n_;
    w_ = std::max(w_, 0.0) + coef_(x);
    if (w_ >= a_) return {true, "recursion", w_};
    return {false, "", w_};
  }

  void reset() override {
    n_ = 0;
    w_ = 0.0;
  }
  std::unique_ptr<Detector> clone() const override { return std::make_unique<CusumDetector>(*this); }
  std::size_t state_size() const override { return 1; }

 private:
  LlrCoef coef_;
  double a_;
  double w_ = 0.0;
};

// --------------------------------------------------------------- m_star ----

// Two-branch windowed variant: short segments (length <= floor(a)) are checked
// against the far pre-change endpoint over a sliding window; longer segments
// reduce to a lagged recursion at the near endpoint.
class MStarDetector final : public Detector {
 public:
  explicit MStarDetector(const DetectorConfig& c) : a_(c.a) {
    validate_common(c, /*positive_a=*/false);
    require(c.lambda.is_singleton(), "m_star needs a singleton post-change parameter");
    require(c.lambda.lo > c.theta.hi, "m_star needs lambda > theta_hi");
    validate_separated(c);
    const Family& f = c.family;
    b_ = static_cast<std::int64_t>(std::floor(c.a));
    coef_lo_ = llr_coef(f, c.lambda.lo, c.theta.lo);
    coef_hi_ = llr_coef(f, c.lambda.lo, c.theta.hi);
    thr_lo_ = f.kl(c.lambda.lo, c.theta.lo) * c.a;
    thr_hi_ = f.kl(c.lambda.lo, c.theta.hi) * c.a;
  }

  StepOutcome step(double x) override {
    ++n_;
    const double u0 = coef_lo_(x);
    const double u1 = coef_hi_(x);
    const double w_new = std::max(w_, 0.0) + u1;
    w_ = w_new;

    double window_best = -std::numeric_limits<double>::infinity();
    if (b_ > 0) {
      u_lo_.push_back(u0);
      if (static_cast<std::int64_t>(u_lo_.size()) > b_) u_lo_.pop_front();
      double acc = 0.0;
      for (auto it = u_lo_.rbegin(); it != u_lo_.rend(); ++it) {
        acc += *it;
        window_best = std::max(window_best, acc);
      }
      u_hi_.push_back(u1);
      if (static_cast<std::int64_t>(u_hi_.size()) > b_) u_hi_.pop_front();
    }

    StepOutcome out{false, "", window_best};
    if (b_ > 0 && window_best >= thr_lo_) out = {true, "theta_lo_window", window_best};

    if (!out.alarm && n_ > b_) {
      double lag_sum = 0.0;
      for (double u : u_hi_) lag_sum += u;
      const double lag_stat = (b_ == 0 ? w_new : w_hist_.front()) + lag_sum;
      if (lag_stat >= thr_hi_) out = {true, "theta_hi_lagged", lag_stat};
      if (!out.alarm) out.statistic = std::max(window_best, lag_stat);
    }

    if (b_ > 0) {
      w_hist_.push_back(w_new);
      if (static_cast<std::int64_t>(w_hist_.size()) > b_) w_hist_.pop_front();
    }
    return out;
  }

  void reset() override {
    n_ = 0;
    w_ = 0.0;
    u_lo_.clear();
    u_hi_.clear();
    w_hist_.clear();
  }
  std::unique_ptr<Detector> clone() const override { return std::make_unique<MStarDetector>(*this); }
  std::size_t state_size() const override {
    return u_lo_.size() + u_hi_.size() + w_hist_.size() + 1;
  }

 private:
  LlrCoef coef_lo_, coef_hi_;
  double a_, thr_lo_ = 0.0, thr_hi_ = 0.0;
  std::int64_t b_ = 0;
  double w_ = 0.0;
  std::deque<double> u_lo_, u_hi_, w_hist_;
};

// ----------------------------------------------------------- m_hat_star ----

// Half-open pre-change set: only segments of length >= ceil(a) count, tested
// at the single finite endpoint theta_1 via a recursion lagged ceil(a)-1.
class MHatStarDetector final : public Detector {
 public:
  explicit MHatStarDetector(const DetectorConfig& c) {
    validate_common(c, /*positive_a=*/true);
    require(c.lambda.is_singleton(), "m_hat_star needs a singleton post-change parameter");
    require(c.family.mean_unbounded_below(),
            "m_hat_star requires a family whose mean is unbounded below");
    require(c.lambda.lo > c.theta.hi, "m_hat_star needs lambda > theta_hi");
    validate_separated(c);
    ceil_a_ = static_cast<std::int64_t>(std::ceil(c.a));
    coef_ = llr_coef(c.family, c.lambda.lo, c.theta.hi);
    thr_ = c.family.kl(c.lambda.lo, c.theta.hi) * c.a;
  }

  StepOutcome step(double x) override {
    ++n_;
    const double u = coef_(x);
    w_ = std::max(w_, 0.0) + u;

    if (ceil_a_ > 1) {
      u_hist_.push_back(u);
      if (static_cast<std::int64_t>(u_hist_.size()) > ceil_a_ - 1) u_hist_.pop_front();
    }
    w_hist_.push_back(w_);
    if (static_cast<std::int64_t>(w_hist_.size()) > ceil_a_) w_hist_.pop_front();

    if (n_ < ceil_a_) return {false, "", kNaN};
    double lag_sum = 0.0;
    for (double v : u_hist_) lag_sum += v;
    const double stat = w_hist_.front() + lag_sum;
    if (stat >= thr_) return {true, "lagged", stat};
    return {false, "", stat};
  }

  void reset() override {
    n_ = 0;
    w_ = 0.0;
    u_hist_.clear();
    w_hist_.clear();
  }
  std::unique_ptr<Detector> clone() const override {
    return std::make_unique<MHatStarDetector>(*this);
  }
  std::size_t state_size() const override { return u_hist_.size() + w_hist_.size() + 1; }

 private:
  LlrCoef coef_;
  double thr_ = 0.0;
  std::int64_t ceil_a_ = 1;
  double w_ = 0.0;
  std::deque<double> u_hist_, w_hist_;
};

// -------------------------------------------------------------- tau_glr ----

// Concave segment score in the natural coordinate; the supremum over the
// post-change interval is the clipped maximum-likelihood point, evaluated
// together with both endpoints for robustness.
double segment_sup(const Family& f, const NaturalInterval& lam, double sum, std::int64_t len,
                   double base_xi, double base_b, bool closed_form, int grid_n) {
  const double m = static_cast<double>(len);
  auto score = [&](double xi) {
    return (xi - base_xi) * sum - m * (f.cumulant(xi, 0) - base_b);
  };
  if (lam.lo == lam.hi) return score(lam.lo);
  if (!closed_form || !f.has_mean_inverse())
    return grid_golden_max(score, lam.lo, lam.hi, grid_n).value;
  double best = std::max(score(lam.lo), score(lam.hi));
  const double xi_hat = f.natural_from_mean(sum / m);
  if (std::isfinite(xi_hat)) {
    const double clipped = std::clamp(xi_hat, lam.lo, lam.hi);
    best = std::max(best, score(clipped));
  }
  return best;
}

class TauGlrDetector final : public Detector {
 public:
  explicit TauGlrDetector(const DetectorConfig& c)
      : family_(c.family), a_(c.a), closed_form_(c.closed_form_sup), grid_n_(c.lambda.grid_n) {
    validate_common(c, /*positive_a=*/true);
    require(c.theta.is_singleton(), "tau_glr needs a singleton pre-change parameter");
    validate_separated(c);
    lam_ = natural_interval(c.family, c.lambda);
    xi0_ = c.family.natural(c.theta.lo);
    b0_ = c.family.cumulant(xi0_, 0);
  }

  StepOutcome step(double x) override {
    ++n_;
    for (auto& s : segs_) {
      s.sum += x;
      ++s.len;
    }
    segs_.push_back({x, 1});

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : segs_)
      best = std::max(best, segment_sup(family_, lam_, s.sum, s.len, xi0_, b0_, closed_form_,
                                        grid_n_));
    const bool alarm = best >= a_;
    if (!alarm) {
      // Dominated starts: a segment whose score is <= 0 for every post-change
      // parameter stays dominated by a fresh restart, so it can be dropped.
      std::erase_if(segs_, [&](const Seg& s) {
        return segment_sup(family_, lam_, s.sum, s.len, xi0_, b0_, closed_form_, grid_n_) <= 0.0;
      });
    }
    return {alarm, alarm ? "glr" : "", best};
  }

  void reset() override {
    n_ = 0;
    segs_.clear();
  }
  std::unique_ptr<Detector> clone() const override { return std::make_unique<TauGlrDetector>(*this); }
  std::size_t state_size() const override { return 2 * segs_.size(); }

 private:
  struct Seg {
    double sum;
    std::int64_t len;
  };
  Family family_;
  double a_;
  bool closed_form_;
  int grid_n_;
  NaturalInterval lam_{};
  double xi0_ = 0.0, b0_ = 0.0;
  std::vector<Seg> segs_;
};

// ------------------------------------------------- t_hat_star / t_star -----

// Shared cycle logic: V is a one-sided recursion whose increments are chosen
// so that V == 0 certifies that every running segment is dominated, for every
// parameter pair, by a restart at the next observation. Detection then only
// ever scans the current cycle.
struct CycleRecursion {
  double sign = 1.0;
  double corner = 0.0;  // phi at the dominating corner of the product set
  double v = 0.0;

  // true when the update zeroed V (start a new cycle).
  bool update(double x) {
    v = std::max(v + sign * (x - corner), 0.0);
    return v == 0.0;
  }
};

CycleRecursion make_cycle_recursion(const Family& f, const ParamSet& theta,
                                    const ParamSet& lambda) {
  const auto th = natural_interval(f, theta);
  const auto la = natural_interval(f, lambda);
  require(la.lo > th.hi || la.hi < th.lo,
          "pre-change and post-change sets must be disjoint in the natural coordinate");
  CycleRecursion r;
  if (la.lo > th.hi) {
    // Post-change naturals above: domination is governed by the smallest phi.
    r.sign = 1.0;
    r.corner = f.phi(f.user(th.lo), f.user(la.lo));
  } else {
    r.sign = -1.0;
    r.corner = f.phi(f.user(th.hi), f.user(la.hi));
  }
  return r;
}

class THatStarDetector final : public Detector {
 public:
  explicit THatStarDetector(const DetectorConfig& c)
      : family_(c.family), theta_(c.theta), a_(c.a), pair_(c.pair),
        closed_form_(c.closed_form_sup), theta_grid_n_(c.theta.grid_n),
        lambda_grid_n_(c.lambda.grid_n) {
    validate_common(c, /*positive_a=*/true);
    validate_pair(c);
    validate_separated(c);
    cycle_ = make_cycle_recursion(c.family, c.theta, c.lambda);
    lam_ = natural_interval(c.family, c.lambda);
    th_nat_ = natural_interval(c.family, c.theta);

    // Constant p admits a closed-form inner infimum.
    p_const_ = pair_->eval_p(theta_.lo);
    for (double t : theta_.grid(17))
      if (std::abs(pair_->eval_p(t) - p_const_) > 1e-14 * std::abs(p_const_)) {
        p_const_ = kNaN;
        break;
      }

    exp_path_ = c.family.kind() == Family::Kind::exponential_rate;
    if (exp_path_) {
      r10_ = family_.phi(theta_.hi, c.lambda.lo);
      stop_thr_ = a_ * grid_golden_max([&](double t) { return pair_->eval_p(t) /
                                                             (c.lambda.lo - t); },
                                       theta_.lo, theta_.hi, theta_grid_n_)
                           .value;
      cont_thr_ = a_ * pair_->eval_p(theta_.hi) / (c.lambda.hi - theta_.hi);
      ck_ = std::make_shared<CkCache>();
      ck_->a = a_;
    }
    cyc_prefix_.push_back(0.0);
  }

  StepOutcome step(double x) override {
    ++n_;
    const bool reset_cycle = cycle_.update(x);
    if (exp_path_) w_fast_ = std::max(w_fast_ + (r10_ - x), 0.0);
    if (reset_cycle) {
      cyc_prefix_.assign(1, 0.0);
      return {false, "", 0.0};
    }
    cyc_prefix_.push_back(cyc_prefix_.back() + x);
    const std::size_t len = cyc_prefix_.size() - 1;

    if (exp_path_) {
      if (w_fast_ >= stop_thr_) return {true, "fast_w", best_statistic()};
      if (w_fast_ <= cont_thr_) return {false, "", kNaN};
      for (std::size_t k = 1; k <= len; ++k) {
        const double qk = cyc_prefix_[len] - cyc_prefix_[len - k];
        if (qk <= ck(k)) return {true, "q_k", best_statistic()};
      }
      return {false, "", kNaN};
    }

    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= len; ++k)
      best = std::max(best, stat_for(cyc_prefix_[len] - cyc_prefix_[len - k],
                                     static_cast<std::int64_t>(k)));
    if (best >= a_) return {true, "glr", best};
    return {false, "", best};
  }

  void reset() override {
    n_ = 0;
    cycle_.v = 0.0;
    w_fast_ = 0.0;
    cyc_prefix_.assign(1, 0.0);
  }
  std::unique_ptr<Detector> clone() const override {
    return std::make_unique<THatStarDetector>(*this);
  }
  std::size_t state_size() const override { return cyc_prefix_.size() + 3; }

 private:
  struct CkCache {
    std::mutex mu;
    double a = 0.0;
    std::vector<double> c;
  };

  // inf over theta of [sup over lambda of the segment score] / p(theta)
  double stat_for(double q, std::int64_t k) const {
    const double sup_part = segment_sup(family_, lam_, q, k, 0.0, 0.0, closed_form_,
                                        lambda_grid_n_);
    const double m = static_cast<double>(k);
    auto numerator = [&](double xi_t) {
      return sup_part - (xi_t * q - m * family_.cumulant(xi_t, 0));
    };
    if (!std::isnan(p_const_)) {
      double best = std::min(numerator(th_nat_.lo), numerator(th_nat_.hi));
      if (family_.has_mean_inverse()) {
        const double xi_hat = family_.natural_from_mean(q / m);
        if (std::isfinite(xi_hat))
          best = std::min(best, numerator(std::clamp(xi_hat, th_nat_.lo, th_nat_.hi)));
      } else if (th_nat_.lo < th_nat_.hi) {
        best = std::min(best, grid_golden_min(numerator, th_nat_.lo, th_nat_.hi,
                                              theta_grid_n_)
                                  .value);
      }
      return best / p_const_;
    }
    auto over_theta = [&](double t) { return numerator(family_.natural(t)) / pair_->eval_p(t); };
    if (theta_.is_singleton()) return over_theta(theta_.lo);
    return grid_golden_min(over_theta, theta_.lo, theta_.hi, theta_grid_n_).value;
  }

  double best_statistic() const {
    const std::size_t len = cyc_prefix_.size() - 1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= len; ++k)
      best = std::max(best, stat_for(cyc_prefix_[len] - cyc_prefix_[len - k],
                                     static_cast<std::int64_t>(k)));
    return best;
  }

  // c_k = inf_theta sup_lambda [k phi(theta,lambda) - p(theta) a / (lambda-theta)]
  double ck(std::size_t k) {
    std::lock_guard<std::mutex> lock(ck_->mu);
    while (ck_->c.size() < k) {
      const double kk = static_cast<double>(ck_->c.size() + 1);
      const double v =
          grid_golden_min(
              [&](double t) {
                return grid_golden_max(
                           [&](double l) {
                             return kk * family_.phi(t, l) - pair_->eval_p(t) * a_ / (l - t);
                           },
                           lam_user_lo(), lam_user_hi(), lambda_grid_n_)
                    .value;
              },
              theta_.lo, theta_.hi, theta_grid_n_)
              .value;
      ck_->c.push_back(v);
    }
    return ck_->c[k - 1];
  }

  double lam_user_lo() const { return std::min(family_.user(lam_.lo), family_.user(lam_.hi)); }
  double lam_user_hi() const { return std::max(family_.user(lam_.lo), family_.user(lam_.hi)); }

  Family family_;
  ParamSet theta_;
  double a_;
  std::shared_ptr<const OptimizerPair> pair_;
  bool closed_form_;
  int theta_grid_n_, lambda_grid_n_;
  CycleRecursion cycle_{};
  NaturalInterval lam_{}, th_nat_{};
  double p_const_ = kNaN;

  bool exp_path_ = false;
  double r10_ = 0.0, stop_thr_ = 0.0, cont_thr_ = 0.0;
  double w_fast_ = 0.0;
  std::shared_ptr<CkCache> ck_;

  std::vector<double> cyc_prefix_;
};

// -------------------------------------------------------- t_star_mixture ---

class TStarMixtureDetector final : public Detector {
 public:
  explicit TStarMixtureDetector(const DetectorConfig& c)
      : family_(c.family), theta_(c.theta), a_(c.a), pair_(c.pair),
        theta_grid_n_(c.theta.grid_n) {
    validate_common(c, /*positive_a=*/true);
    validate_pair(c);
    validate_separated(c);
    require(c.eta_grid_n >= 2 || (c.allow_single_eta_node && c.eta_grid_n == 1),
            "eta_grid_n must be >= 2");
    th_nat_ = natural_interval(c.family, c.theta);

    const double ref = theta_.hi;
    xi_ref_ = family_.natural(ref);
    b_ref_ = family_.cumulant(xi_ref_, 0);
    std::vector<double> nodes;
    if (c.lambda.is_singleton() || c.eta_grid_n == 1)
      nodes = {c.lambda.lo};
    else
      nodes = c.lambda.grid(c.eta_grid_n);
    for (double l : nodes) coefs_.push_back(llr_coef(family_, l, ref));
    log_w_ = -std::log(static_cast<double>(coefs_.size()));

    p_const_ = pair_->eval_p(theta_.lo);
    for (double t : theta_.grid(17))
      if (std::abs(pair_->eval_p(t) - p_const_) > 1e-14 * std::abs(p_const_)) {
        p_const_ = kNaN;
        break;
      }
  }

  StepOutcome step(double x) override {
    ++n_;
    for (auto& c : cands_) {
      c.sum += x;
      ++c.len;
      for (std::size_t j = 0; j < coefs_.size(); ++j) c.m[j] += coefs_[j](x);
    }
    Cand fresh;
    fresh.sum = x;
    fresh.len = 1;
    fresh.m.resize(coefs_.size());
    for (std::size_t j = 0; j < coefs_.size(); ++j) fresh.m[j] = coefs_[j](x);
    cands_.push_back(std::move(fresh));

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : cands_) best = std::max(best, stat_of(c));
    if (best >= a_) return {true, "mixture", best};

    std::erase_if(cands_, [&](const Cand& c) { return dominated(c); });
    return {false, "", best};
  }

  void reset() override {
    n_ = 0;
    cands_.clear();
  }
  std::unique_ptr<Detector> clone() const override {
    return std::make_unique<TStarMixtureDetector>(*this);
  }
  std::size_t state_size() const override { return cands_.size() * (coefs_.size() + 2); }

 private:
  struct Cand {
    double sum = 0.0;
    std::int64_t len = 0;
    std::vector<double> m;
  };

  // log p_ref-relative correction: log prod f_ref / f_theta over the segment.
  double corr(const Cand& c, double xi_t) const {
    return (xi_ref_ - xi_t) * c.sum -
           static_cast<double>(c.len) * (b_ref_ - family_.cumulant(xi_t, 0));
  }

  double lse(const Cand& c) const {
    double mx = c.m[0];
    for (double v : c.m) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : c.m) s += std::exp(v - mx);
    return log_w_ + mx + std::log(s);
  }

  double stat_of(const Cand& c) const {
    const double base = lse(c);
    auto numerator = [&](double xi_t) { return base + corr(c, xi_t); };
    if (!std::isnan(p_const_)) {
      double best = std::min(numerator(th_nat_.lo), numerator(th_nat_.hi));
      if (family_.has_mean_inverse()) {
        const double xi_hat = family_.natural_from_mean(c.sum / static_cast<double>(c.len));
        if (std::isfinite(xi_hat))
          best = std::min(best, numerator(std::clamp(xi_hat, th_nat_.lo, th_nat_.hi)));
      } else if (th_nat_.lo < th_nat_.hi) {
        best = std::min(best,
                        grid_golden_min(numerator, th_nat_.lo, th_nat_.hi, theta_grid_n_).value);
      }
      return best / p_const_;
    }
    auto over_theta = [&](double t) { return numerator(family_.natural(t)) / pair_->eval_p(t); };
    if (theta_.is_singleton()) return over_theta(theta_.lo);
    return grid_golden_min(over_theta, theta_.lo, theta_.hi, theta_grid_n_).value;
  }

  // Every mixture component nonpositive for every theta: the candidate stays
  // dominated by a restart, mirroring the GLR pruning.
  bool dominated(const Cand& c) const {
    double mx = c.m[0];
    for (double v : c.m) mx = std::max(mx, v);
    const double corr_sup = std::max(corr(c, th_nat_.lo), corr(c, th_nat_.hi));
    return mx + corr_sup <= 0.0;
  }

  Family family_;
  ParamSet theta_;
  double a_;
  std::shared_ptr<const OptimizerPair> pair_;
  int theta_grid_n_;
  NaturalInterval th_nat_{};
  double xi_ref_ = 0.0, b_ref_ = 0.0, log_w_ = 0.0;
  double p_const_ = kNaN;
  std::vector<LlrCoef> coefs_;
  std::vector<Cand> cands_;
};

// ------------------------------------------------- t_beta / t_zero ---------

class TBetaStarDetector final : public Detector {
 public:
  explicit TBetaStarDetector(const DetectorConfig& c) : beta_(c.beta) {
    validate_common(c, /*positive_a=*/true);
    require(c.family.kind() == Family::Kind::normal_mean, "t_beta_star is normal-mean only");
    require(c.beta >= 0.5, "t_beta_star needs beta >= 1/2");
    a_pow_ = std::pow(c.a, c.beta);
    prefix_.push_back(0.0);
  }

  StepOutcome step(double x) override {
    ++n_;
    prefix_.push_back(prefix_.back() + x);
    const double sn = prefix_.back();
    double best = -std::numeric_limits<double>::infinity();
    const std::size_t n = prefix_.size() - 1;
    for (std::size_t m = 1; m <= n; ++m)
      best = std::max(best, (sn - prefix_[n - m]) * std::pow(static_cast<double>(m), beta_ - 1.0));
    if (best >= a_pow_) return {true, "power_scan", best};
    return {false, "", best};
  }

  void reset() override {
    n_ = 0;
    prefix_.assign(1, 0.0);
  }
  std::unique_ptr<Detector> clone() const override {
    return std::make_unique<TBetaStarDetector>(*this);
  }
  std::size_t state_size() const override { return prefix_.size(); }

 private:
  double beta_, a_pow_ = 0.0;
  std::vector<double> prefix_;
};

class TZeroStarDetector final : public Detector {
 public:
  explicit TZeroStarDetector(const DetectorConfig& c) {
    validate_common(c, /*positive_a=*/true);
    require(c.family.kind() == Family::Kind::normal_mean, "t_zero_star is normal-mean only");
    ceil_a_ = static_cast<std::int64_t>(std::ceil(c.a));
    recent_.push_back(0.0);  // S_0
  }

  StepOutcome step(double x) override {
    ++n_;
    s_ += x;
    recent_.push_back(s_);
    while (static_cast<std::int64_t>(recent_.size()) > ceil_a_ + 1) {
      run_min_ = std::min(run_min_, recent_.front());
      recent_.pop_front();
    }
    if (n_ < ceil_a_) return {false, "", kNaN};
    const double eligible = std::min(run_min_, recent_.front());
    const double stat = s_ - eligible;
    if (s_ >= eligible) return {true, "lagged_min", stat};
    return {false, "", stat};
  }

  void reset() override {
    n_ = 0;
    s_ = 0.0;
    run_min_ = std::numeric_limits<double>::infinity();
    recent_.assign(1, 0.0);
  }
  std::unique_ptr<Detector> clone() const override {
    return std::make_unique<TZeroStarDetector>(*this);
  }
  std::size_t state_size() const override { return recent_.size() + 2; }

 private:
  std::int64_t ceil_a_ = 1;
  double s_ = 0.0;
  double run_min_ = std::numeric_limits<double>::infinity();
  std::deque<double> recent_;
};

// --------------------------------------------------------------- open_m ----

// One-shot open-ended test. For each n the binding pre-change endpoint is
// known in advance: the user-low endpoint while n <= a, the user-high one
// afterwards, so two running log-likelihood sums suffice.
class OpenMDetector final : public Detector {
 public:
  explicit OpenMDetector(const DetectorConfig& c) : a_(c.a) {
    validate_common(c, /*positive_a=*/false);
    require(c.lambda.is_singleton(), "open_m needs a singleton post-change parameter");
    require(c.lambda.lo > c.theta.hi, "open_m needs lambda > theta_hi");
    validate_separated(c);
    coef_lo_ = llr_coef(c.family, c.lambda.lo, c.theta.lo);
    coef_hi_ = llr_coef(c.family, c.lambda.lo, c.theta.hi);
    thr_lo_ = c.family.kl(c.lambda.lo, c.theta.lo) * c.a;
    thr_hi_ = c.family.kl(c.lambda.lo, c.theta.hi) * c.a;
  }

  StepOutcome step(double x) override {
    ++n_;
    sum_lo_ += coef_lo_(x);
    sum_hi_ += coef_hi_(x);
    const bool low_binding = static_cast<double>(n_) <= a_;
    const double stat = low_binding ? sum_lo_ : sum_hi_;
    const double thr = low_binding ? thr_lo_ : thr_hi_;
    if (stat >= thr)
      return {true, low_binding ? "endpoint_lo" : "endpoint_hi", stat};
    return {false, "", stat};
  }

  void reset() override {
    n_ = 0;
    sum_lo_ = sum_hi_ = 0.0;
  }
  std::unique_ptr<Detector> clone() const override { return std::make_unique<OpenMDetector>(*this); }
  std::size_t state_size() const override { return 2; }

 private:
  LlrCoef coef_lo_, coef_hi_;
  double a_, thr_lo_ = 0.0, thr_hi_ = 0.0;
  double sum_lo_ = 0.0, sum_hi_ = 0.0;
};

}  // namespace

Procedure procedure_from_string(const std::string& s) {
  if (s == "cusum") return Procedure::cusum;
  if (s == "m_star") return Procedure::m_star;
  if (s == "m_hat_star") return Procedure::m_hat_star;
  if (s == "tau_glr") return Procedure::tau_glr;
  if (s == "t_hat_star_glr" || s == "t_hat_star") return Procedure::t_hat_star_glr;
  if (s == "t_star_mixture" || s == "t_star") return Procedure::t_star_mixture;
  if (s == "t_beta_star") return Procedure::t_beta_star;
  if (s == "t_zero_star") return Procedure::t_zero_star;
  if (s == "open_m") return Procedure::open_m;
  throw ConfigError("unknown procedure: " + s);
}

std::string to_string(Procedure p) {
  switch (p) {
    case Procedure::cusum: return "cusum";
    case Procedure::m_star: return "m_star";
    case Procedure::m_hat_star: return "m_hat_star";
    case Procedure::tau_glr: return "tau_glr";
    case Procedure::t_hat_star_glr: return "t_hat_star_glr";
    case Procedure::t_star_mixture: return "t_star_mixture";
    case Procedure::t_beta_star: return "t_beta_star";
    case Procedure::t_zero_star: return "t_zero_star";
    case Procedure::open_m: return "open_m";
  }
  throw ConfigError("unknown procedure enum");
}

std::unique_ptr<Detector> make_detector(const DetectorConfig& config) {
  switch (config.procedure) {
    case Procedure::cusum: return std::make_unique<CusumDetector>(config);
    case Procedure::m_star: return std::make_unique<MStarDetector>(config);
    case Procedure::m_hat_star: return std::make_unique<MHatStarDetector>(config);
    case Procedure::tau_glr: return std::make_unique<TauGlrDetector>(config);
    case Procedure::t_hat_star_glr: return std::make_unique<THatStarDetector>(config);
    case Procedure::t_star_mixture: return std::make_unique<TStarMixtureDetector>(config);
    case Procedure::t_beta_star: return std::make_unique<TBetaStarDetector>(config);
    case Procedure::t_zero_star: return std::make_unique<TZeroStarDetector>(config);
    case Procedure::open_m: return std::make_unique<OpenMDetector>(config);
  }
  throw ConfigError("unknown procedure enum");
}

AlarmReport run_detector(Detector& det, std::span<const double> xs, std::int64_t max_steps) {
  if (xs.empty()) throw ConfigError("run_detector: empty observation stream");
  AlarmReport rep;
  std::int64_t n = 0;
  for (double x : xs) {
    if (max_steps > 0 && n >= max_steps) break;
    ++n;
    const StepOutcome out = det.step(x);
    if (out.alarm) {
      rep.stopped = true;
      rep.n_stop = n;
      rep.branch = out.branch;
      rep.statistic = out.statistic;
      return rep;
    }
  }
  rep.censored = true;
  rep.n_stop = n;
  return rep;
}

AlarmReport run_detector(const DetectorConfig& config, std::span<const double> xs,
                         std::int64_t max_steps) {
  auto det = make_detector(config);
  return run_detector(*det, xs, max_steps);
}

}  // namespace seqdet

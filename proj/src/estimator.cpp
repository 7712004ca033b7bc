#include "rmean/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmean {

RobustnessParams::RobustnessParams(double eta_in, double delta_in)
    : eta(eta_in), delta(delta_in) {
  if (!(std::isfinite(eta) && eta > 0.0 && eta < 1.0 / 16.0)) {
    throw std::invalid_argument("RobustnessParams: eta must lie in (0, 1/16)");
  }
  if (!(std::isfinite(delta) && delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("RobustnessParams: delta must lie in (0, 1)");
  }
}

double RobustnessParams::log_term() const { return std::log(4.0 / delta); }

double compute_epsilon(const RobustnessParams& params, std::int64_t t) {
  if (t < 1) throw std::domain_error("compute_epsilon: t must be >= 1");
  return 8.0 * params.eta + 12.0 * params.log_term() / static_cast<double>(t);
}

double trim_clamp(const TrimBounds& bounds, double x) {
  if (x < bounds.alpha) return bounds.alpha;
  if (x > bounds.beta) return bounds.beta;
  return x;
}

namespace {

// Shared index rule; callers guarantee 0 < eps <= 1/2 and a non-empty set.
TrimBounds thresholds_by_rank(const OrderStatMultiset& samples, double eps) {
  const std::int64_t t = samples.size();
  const auto clamp_rank = [t](std::int64_t r) {
    return std::clamp<std::int64_t>(r, 1, t);
  };
  const std::int64_t alpha_rank =
      clamp_rank(static_cast<std::int64_t>(std::floor(eps * static_cast<double>(t))));
  const std::int64_t beta_rank = clamp_rank(
      static_cast<std::int64_t>(std::ceil((1.0 - eps) * static_cast<double>(t))));
  return TrimBounds{samples.select(alpha_rank), samples.select(beta_rank)};
}

}  // namespace

TrimBounds trimming_thresholds(const OrderStatMultiset& samples,
                               double epsilon) {
  if (samples.empty()) {
    throw std::logic_error("trimming_thresholds: empty sample multiset");
  }
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::domain_error("trimming_thresholds: epsilon must lie in (0, 1/2)");
  }
  return thresholds_by_rank(samples, epsilon);
}

TrimBounds trimming_thresholds_capped(const OrderStatMultiset& samples,
                                      double epsilon) {
  if (samples.empty()) {
    throw std::logic_error("trimming_thresholds: empty sample multiset");
  }
  if (!(epsilon > 0.0)) {
    throw std::domain_error("trimming_thresholds: epsilon must be positive");
  }
  return thresholds_by_rank(samples, std::min(epsilon, 0.5));
}

double batch_trimmed_mean(std::span<const double> samples,
                          const TrimBounds& bounds) {
  if (samples.empty()) {
    throw std::logic_error("batch_trimmed_mean: no samples");
  }
  double mu = 0.0;
  std::int64_t n = 0;
  for (double x : samples) {
    mu = recursive_mean_update(mu, trim_clamp(bounds, x), ++n);
  }
  return mu;
}

double recursive_mean_update(double previous, double clamped, std::int64_t n) {
  return (static_cast<double>(n - 1) * previous + clamped) /
         static_cast<double>(n);
}

FixedTrimEstimator::FixedTrimEstimator(const RobustnessParams& params,
                                       std::int64_t t0)
    : params_(params), t0_(t0) {
  if (t0 < 1) {
    throw std::invalid_argument("FixedTrimEstimator: t0 must be >= 1");
  }
  warmup_.reserve(static_cast<std::size_t>(t0));
}

void FixedTrimEstimator::observe(double x) {
  if (t_ < t0_) {
    warmup_.push_back(x);
    ++t_;
    if (t_ == t0_) finish_warmup();
    return;
  }
  ++t_;
  mu_hat_ = recursive_mean_update(mu_hat_, trim_clamp(*bounds_, x), t_ - t0_);
}

void FixedTrimEstimator::finish_warmup() {
  OrderStatMultiset reference;
  for (double x : warmup_) reference.insert(x);
  warmup_.clear();
  warmup_.shrink_to_fit();
  epsilon_ = compute_epsilon(params_, t0_);
  pre_asymptotic_ = epsilon_degenerate(epsilon_);
  bounds_ = trimming_thresholds_capped(reference, epsilon_);
}

std::optional<double> FixedTrimEstimator::estimate() const {
  if (t_ <= t0_) return std::nullopt;
  return mu_hat_;
}

const TrimBounds& FixedTrimEstimator::bounds() const {
  if (!bounds_) {
    throw std::logic_error("FixedTrimEstimator: still warming up");
  }
  return *bounds_;
}

double FixedTrimEstimator::epsilon() const {
  if (!bounds_) {
    throw std::logic_error("FixedTrimEstimator: still warming up");
  }
  return epsilon_;
}

bool FixedTrimEstimator::pre_asymptotic() const {
  if (!bounds_) {
    throw std::logic_error("FixedTrimEstimator: still warming up");
  }
  return pre_asymptotic_;
}

AdaptiveTrimEstimator::AdaptiveTrimEstimator(const RobustnessParams& params)
    : params_(params),
      schedule_([params](std::int64_t t) { return compute_epsilon(params, t); }) {}

AdaptiveTrimEstimator::AdaptiveTrimEstimator(
    const RobustnessParams& params, std::function<double(std::int64_t)> schedule)
    : params_(params), schedule_(std::move(schedule)) {
  if (!schedule_) {
    throw std::invalid_argument("AdaptiveTrimEstimator: empty schedule");
  }
}

void AdaptiveTrimEstimator::step(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::domain_error("AdaptiveTrimEstimator::step: non-finite input");
  }
  y_samples_.insert(y);
  ++t_;
  epsilon_ = schedule_(t_);
  pre_asymptotic_ = epsilon_degenerate(epsilon_);
  bounds_ = trimming_thresholds_capped(y_samples_, epsilon_);
  mu_hat_ = recursive_mean_update(mu_hat_, trim_clamp(bounds_, x), t_);
}

std::optional<double> AdaptiveTrimEstimator::estimate() const {
  if (t_ == 0) return std::nullopt;
  return mu_hat_;
}

const TrimBounds& AdaptiveTrimEstimator::bounds() const {
  if (t_ == 0) throw std::logic_error("AdaptiveTrimEstimator: no samples yet");
  return bounds_;
}

double AdaptiveTrimEstimator::epsilon() const {
  if (t_ == 0) throw std::logic_error("AdaptiveTrimEstimator: no samples yet");
  return epsilon_;
}

bool AdaptiveTrimEstimator::pre_asymptotic() const {
  if (t_ == 0) throw std::logic_error("AdaptiveTrimEstimator: no samples yet");
  return pre_asymptotic_;
}

ThresholdCheck lemma1_diagnostics(std::span<const double> clean_samples,
                                  const DistributionSpec& dist, double epsilon,
                                  const TrimBounds* thresholds) {
  if (clean_samples.empty()) {
    throw std::logic_error("lemma1_diagnostics: no samples");
  }
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::domain_error("lemma1_diagnostics: epsilon must lie in (0, 1/2)");
  }
  const double t = static_cast<double>(clean_samples.size());
  const double mu = dist.mean();
  const double q_upper_outer = dist.centered_quantile(1.0 - 2.0 * epsilon);
  const double q_upper_inner = dist.centered_quantile(1.0 - epsilon / 2.0);
  const double q_lower_outer = dist.centered_quantile(2.0 * epsilon);
  const double q_lower_inner = dist.centered_quantile(epsilon / 2.0);

  std::int64_t above_upper_outer = 0;  // samples >= mu + Q_{1-2eps}
  std::int64_t below_upper_inner = 0;  // samples <= mu + Q_{1-eps/2}
  std::int64_t below_lower_outer = 0;  // samples <= mu + Q_{2eps}
  std::int64_t above_lower_inner = 0;  // samples >= mu + Q_{eps/2}
  for (double y : clean_samples) {
    if (y >= mu + q_upper_outer) ++above_upper_outer;
    if (y <= mu + q_upper_inner) ++below_upper_inner;
    if (y <= mu + q_lower_outer) ++below_lower_outer;
    if (y >= mu + q_lower_inner) ++above_lower_inner;
  }

  ThresholdCheck check{};
  check.counts_ok[0] =
      static_cast<double>(above_upper_outer) >= 1.5 * epsilon * t;
  check.counts_ok[1] =
      static_cast<double>(below_upper_inner) >= (1.0 - 0.75 * epsilon) * t;
  check.counts_ok[2] =
      static_cast<double>(below_lower_outer) >= 1.5 * epsilon * t;
  check.counts_ok[3] =
      static_cast<double>(above_lower_inner) >= (1.0 - 0.75 * epsilon) * t;
  check.bad_event = !(check.counts_ok[0] && check.counts_ok[1] &&
                      check.counts_ok[2] && check.counts_ok[3]);
  check.sandwich_checked = thresholds != nullptr;
  if (thresholds) {
    const bool upper_ok = q_upper_outer <= thresholds->beta - mu &&
                          thresholds->beta - mu <= q_upper_inner;
    const bool lower_ok = q_lower_inner <= thresholds->alpha - mu &&
                          thresholds->alpha - mu <= q_lower_outer;
    check.sandwich_ok = upper_ok && lower_ok;
  } else {
    check.sandwich_ok = false;
  }
  return check;
}

std::int64_t DiagnosticsRecord::first_clean_time() const {
  for (std::size_t i = bad_event.size(); i > 0; --i) {
    if (bad_event[i - 1]) return static_cast<std::int64_t>(i) + 1;
  }
  return 1;
}

}  // namespace rmean

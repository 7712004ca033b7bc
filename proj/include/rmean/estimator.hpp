#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rmean/distribution.hpp"
#include "rmean/order_stat_tree.hpp"

namespace rmean {

// Contamination rate eta in (0, 1/16) and failure probability delta in (0, 1).
struct RobustnessParams {
  RobustnessParams(double eta, double delta);

  double eta;
  double delta;

  // log(4 / delta), natural log.
  double log_term() const;
};

// Trimming-rate schedule: eps_t = 8*eta + 12*log(4/delta)/t. Strictly
// decreasing in t with limit 8*eta.
double compute_epsilon(const RobustnessParams& params, std::int64_t t);

// The schedule is only meaningful as a trimming rate once it drops below 1/2;
// earlier times are flagged as pre-asymptotic and the thresholds degrade to
// the median pair.
inline bool epsilon_degenerate(double epsilon) { return epsilon >= 0.5; }

struct TrimBounds {
  double alpha;  // lower threshold
  double beta;   // upper threshold, alpha <= beta
};

// Clamp x into [bounds.alpha, bounds.beta].
double trim_clamp(const TrimBounds& bounds, double x);

// Empirical trimming thresholds from reference samples: alpha at rank
// floor(eps*t), beta at rank ceil((1-eps)*t), both clamped into [1, t].
// Requires 0 < eps < 1/2 and a non-empty multiset.
TrimBounds trimming_thresholds(const OrderStatMultiset& samples,
                               double epsilon);

// Same index rule with eps capped at 1/2, so pre-asymptotic schedules pin the
// thresholds to the median pair instead of failing.
TrimBounds trimming_thresholds_capped(const OrderStatMultiset& samples,
                                      double epsilon);

// Mean of the samples after clamping each into the given bounds.
double batch_trimmed_mean(std::span<const double> samples,
                          const TrimBounds& bounds);

// One step of the running-mean recursion over clamped values:
// ((n - 1) * previous + clamped) / n. Kept out of line so every caller runs
// the identical floating-point code path.
double recursive_mean_update(double previous, double clamped, std::int64_t n);

// Online trimmed mean with thresholds frozen after a warm-up prefix. The
// first t0 samples only feed the threshold estimate and are then discarded;
// the estimate averages clamped samples from t0+1 on.
class FixedTrimEstimator {
 public:
  FixedTrimEstimator(const RobustnessParams& params, std::int64_t t0);

  // Feed the next sample; buffers during warm-up, updates afterwards.
  void observe(double x);

  bool warmed_up() const { return t_ >= t0_; }
  std::int64_t time() const { return t_; }
  std::int64_t warmup_length() const { return t0_; }
  const RobustnessParams& params() const { return params_; }

  // Empty until at least one post-warm-up sample has arrived.
  std::optional<double> estimate() const;

  // Thresholds, schedule value and degeneracy flag; only valid once warm-up
  // has completed.
  const TrimBounds& bounds() const;
  double epsilon() const;
  bool pre_asymptotic() const;

 private:
  void finish_warmup();

  RobustnessParams params_;
  std::int64_t t0_;
  std::vector<double> warmup_;
  std::int64_t t_ = 0;
  double mu_hat_ = 0.0;
  std::optional<TrimBounds> bounds_;
  double epsilon_ = 0.0;
  bool pre_asymptotic_ = false;
};

// Online trimmed mean with thresholds recomputed each step from a second
// sample stream. Step t inserts y_t into the reference multiset, evaluates
// the schedule at t, refreshes the thresholds and folds the clamped x_t into
// the running mean.
class AdaptiveTrimEstimator {
 public:
  explicit AdaptiveTrimEstimator(const RobustnessParams& params);

  // Custom trimming-rate schedule (used by tests to pin eps_t); values
  // must stay positive.
  AdaptiveTrimEstimator(const RobustnessParams& params,
                        std::function<double(std::int64_t)> schedule);

  void step(double x, double y);

  std::int64_t time() const { return t_; }
  const RobustnessParams& params() const { return params_; }
  std::optional<double> estimate() const;

  // Valid after the first step.
  const TrimBounds& bounds() const;
  double epsilon() const;
  bool pre_asymptotic() const;

  const OrderStatMultiset& reference_samples() const { return y_samples_; }

 private:
  RobustnessParams params_;
  std::function<double(std::int64_t)> schedule_;
  OrderStatMultiset y_samples_;
  std::int64_t t_ = 0;
  double mu_hat_ = 0.0;
  TrimBounds bounds_{0.0, 0.0};
  double epsilon_ = 0.0;
  bool pre_asymptotic_ = false;
};

// Per-step results of the threshold-quality check: the four sample-counting
// conditions that place enough mass around each quantile boundary, plus the
// quantile sandwich on supplied thresholds.
struct ThresholdCheck {
  bool bad_event;                   // any counting condition failed
  std::array<bool, 4> counts_ok;    // upper tail, upper mass, lower tail, lower mass
  bool sandwich_checked;
  bool sandwich_ok;
};

// Evaluate the counting conditions for clean samples from `dist` at trimming
// rate eps in (0, 1/2). When `thresholds` is given, also checks that they fall
// inside the quantile sandwich around the true mean.
ThresholdCheck lemma1_diagnostics(std::span<const double> clean_samples,
                                  const DistributionSpec& dist, double epsilon,
                                  const TrimBounds* thresholds = nullptr);

// Per-time bad-event flags collected over a run, and the first time from
// which the record stays clean.
struct DiagnosticsRecord {
  std::vector<std::uint8_t> bad_event;

  // 1 + (last time with a bad event); 1 if the record is entirely clean.
  // Times are 1-based: bad_event[i] refers to time i+1.
  std::int64_t first_clean_time() const;
};

}  // namespace rmean

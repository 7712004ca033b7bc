#pragma once

#include <cstdint>

#include "rmean/estimator.hpp"

namespace rmean {

// Bound on |Q_p| for a centered variable with standard deviation sigma:
// sigma / sqrt(1 - p). Requires 0 < p < 1.
double quantile_abs_bound(double sigma, double p);

// Worst-case estimation error at trimming rate eps: sigma * sqrt(8 * eps).
double estimation_error_bound_E(double sigma, double epsilon);

// High-probability error bound for the fixed-threshold estimator evaluated
// at time t >= 2*t0: 3*E(4*eps_{t0}) + 2*sigma*sqrt(log(4/delta)/(t - t0)).
// Requires delta >= 4*exp(-(t - t0)).
double theorem1_bound(const RobustnessParams& params, double sigma,
                      std::int64_t t0, std::int64_t t);

// Limit of the theorem1 tail with the schedule substituted:
// 24*sigma*sqrt(4*eta + 6*log(4/delta)/t0).
double corollary1_limit(const RobustnessParams& params, double sigma,
                        std::int64_t t0);

// Per-step ceiling U_j = sigma / sqrt(4*eta + 6*log(4/delta)/j) on the
// adaptive estimator's clamped deviation; non-decreasing in j with limit
// sigma / (2*sqrt(eta)).
double theorem2_summand(const RobustnessParams& params, double sigma,
                        std::int64_t j);

// Error bound for the adaptive estimator at time t >= t_bar, given the error
// at the first clean time t_bar:
// (t_bar/t)*err_at_tbar + (1/t) * sum_{j=t_bar+1}^t U_j.
double theorem2_bound(const RobustnessParams& params, double sigma,
                      std::int64_t t_bar, double err_at_tbar, std::int64_t t);

// Same bound with the summand tail sum_{j=t_bar+1}^t U_j supplied by the
// caller, for incremental evaluation along a trajectory.
double theorem2_bound_given_tail(std::int64_t t_bar, double err_at_tbar,
                                 std::int64_t t, double tail_sum);

// Uniform ceiling on the adaptive tail: sigma / (2*sqrt(eta)).
double corollary2_bound(double sigma, double eta);

}  // namespace rmean

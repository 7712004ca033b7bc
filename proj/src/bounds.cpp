#include "rmean/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace rmean {

double quantile_abs_bound(double sigma, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("quantile_abs_bound: p must lie in (0, 1)");
  }
  if (!(sigma >= 0.0)) {
    throw std::domain_error("quantile_abs_bound: sigma must be >= 0");
  }
  return sigma / std::sqrt(1.0 - p);
}

double estimation_error_bound_E(double sigma, double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw std::domain_error("estimation_error_bound_E: epsilon must be >= 0");
  }
  if (!(sigma >= 0.0)) {
    throw std::domain_error("estimation_error_bound_E: sigma must be >= 0");
  }
  return sigma * std::sqrt(8.0 * epsilon);
}

double theorem1_bound(const RobustnessParams& params, double sigma,
                      std::int64_t t0, std::int64_t t) {
  if (t0 < 1) throw std::domain_error("theorem1_bound: t0 must be >= 1");
  if (t < 2 * t0) {
    throw std::domain_error("theorem1_bound: requires t >= 2*t0");
  }
  if (params.delta < 4.0 * std::exp(-static_cast<double>(t - t0))) {
    throw std::domain_error(
        "theorem1_bound: requires delta >= 4*exp(-(t - t0))");
  }
  const double eps_t0 = compute_epsilon(params, t0);
  return 3.0 * estimation_error_bound_E(sigma, 4.0 * eps_t0) +
         2.0 * sigma * std::sqrt(params.log_term() / static_cast<double>(t - t0));
}

double corollary1_limit(const RobustnessParams& params, double sigma,
                        std::int64_t t0) {
  if (t0 < 1) throw std::domain_error("corollary1_limit: t0 must be >= 1");
  return 24.0 * sigma *
         std::sqrt(4.0 * params.eta +
                   6.0 * params.log_term() / static_cast<double>(t0));
}

double theorem2_summand(const RobustnessParams& params, double sigma,
                        std::int64_t j) {
  if (j < 1) throw std::domain_error("theorem2_summand: j must be >= 1");
  if (!(sigma >= 0.0)) {
    throw std::domain_error("theorem2_summand: sigma must be >= 0");
  }
  return sigma / std::sqrt(4.0 * params.eta +
                           6.0 * params.log_term() / static_cast<double>(j));
}

double theorem2_bound(const RobustnessParams& params, double sigma,
                      std::int64_t t_bar, double err_at_tbar, std::int64_t t) {
  double tail = 0.0;
  if (t >= t_bar) {
    for (std::int64_t j = t_bar + 1; j <= t; ++j) {
      tail += theorem2_summand(params, sigma, j);
    }
  }
  return theorem2_bound_given_tail(t_bar, err_at_tbar, t, tail);
}

double theorem2_bound_given_tail(std::int64_t t_bar, double err_at_tbar,
                                 std::int64_t t, double tail_sum) {
  if (t_bar < 1) throw std::domain_error("theorem2_bound: t_bar must be >= 1");
  if (t < t_bar) throw std::domain_error("theorem2_bound: requires t >= t_bar");
  if (!(err_at_tbar >= 0.0)) {
    throw std::domain_error("theorem2_bound: err_at_tbar must be >= 0");
  }
  const double td = static_cast<double>(t);
  return (static_cast<double>(t_bar) / td) * err_at_tbar + tail_sum / td;
}

double corollary2_bound(double sigma, double eta) {
  if (!(eta > 0.0)) throw std::domain_error("corollary2_bound: eta must be > 0");
  if (!(sigma >= 0.0)) {
    throw std::domain_error("corollary2_bound: sigma must be >= 0");
  }
  return sigma / (2.0 * std::sqrt(eta));
}

}  // namespace rmean

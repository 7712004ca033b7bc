#pragma once

#include <string>

#include <json.hpp>

#include "rmean/rng.hpp"

namespace rmean {

enum class DistFamily { gaussian, student_t, uniform };

std::string to_string(DistFamily family);

// A sampling distribution with known mean and standard deviation. Families
// are restricted to ones with finite variance: Gaussian, Student-t with
// dof > 2 (location-scale), and uniform on [lo, hi].
class DistributionSpec {
 public:
  static DistributionSpec gaussian(double mean, double stddev);
  static DistributionSpec student_t(double dof, double location, double scale);
  static DistributionSpec uniform(double lo, double hi);

  DistFamily family() const { return family_; }
  double mean() const { return mean_; }
  double stddev() const { return stddev_; }

  // Quantile of the centered variable X - mean() at probability p in (0, 1).
  double centered_quantile(double p) const;

  double sample(RngStream& rng) const;

  static DistributionSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  DistributionSpec(DistFamily family, double p1, double p2, double mean,
                   double stddev)
      : family_(family), p1_(p1), p2_(p2), mean_(mean), stddev_(stddev) {}

  DistFamily family_;
  double p1_;  // gaussian: mean, student_t: dof, uniform: lo
  double p2_;  // gaussian: stddev, student_t: scale, uniform: hi
  double mean_;
  double stddev_;
};

}  // namespace rmean

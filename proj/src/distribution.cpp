#include "rmean/distribution.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace rmean {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

void check_keys(const nlohmann::json& j,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("distribution: unknown key '" + item.key() +
                                  "'");
    }
  }
}

// Bailey's polar method for Student-t: one unit-disc rejection pair yields a
// standard t variate with `dof` degrees of freedom.
double sample_student_t(RngStream& rng, double dof) {
  double u, v, w;
  do {
    u = 2.0 * rng.uniform01() - 1.0;
    v = 2.0 * rng.uniform01() - 1.0;
    w = u * u + v * v;
  } while (w >= 1.0 || w == 0.0);
  return u * std::sqrt(dof * (std::pow(w, -2.0 / dof) - 1.0) / w);
}

}  // namespace

std::string to_string(DistFamily family) {
  switch (family) {
    case DistFamily::gaussian:
      return "gaussian";
    case DistFamily::student_t:
      return "student_t";
    case DistFamily::uniform:
      return "uniform";
  }
  throw std::logic_error("unreachable distribution family");
}

DistributionSpec DistributionSpec::gaussian(double mean, double stddev) {
  require(std::isfinite(mean) && std::isfinite(stddev),
          "gaussian: parameters must be finite");
  require(stddev >= 0.0, "gaussian: stddev must be >= 0");
  return DistributionSpec(DistFamily::gaussian, mean, stddev, mean, stddev);
}

DistributionSpec DistributionSpec::student_t(double dof, double location,
                                             double scale) {
  require(std::isfinite(dof) && std::isfinite(location) && std::isfinite(scale),
          "student_t: parameters must be finite");
  require(dof > 2.0, "student_t: dof must be > 2 for finite variance");
  require(scale > 0.0, "student_t: scale must be > 0");
  const double stddev = scale * std::sqrt(dof / (dof - 2.0));
  return DistributionSpec(DistFamily::student_t, dof, scale, location, stddev);
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi),
          "uniform: parameters must be finite");
  require(lo <= hi, "uniform: lo must be <= hi");
  const double mean = 0.5 * (lo + hi);
  const double stddev = (hi - lo) / std::sqrt(12.0);
  return DistributionSpec(DistFamily::uniform, lo, hi, mean, stddev);
}

double DistributionSpec::centered_quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("centered_quantile: p must lie in (0, 1)");
  }
  switch (family_) {
    case DistFamily::gaussian: {
      if (p2_ == 0.0) return 0.0;
      boost::math::normal_distribution<double> d(0.0, p2_);
      return boost::math::quantile(d, p);
    }
    case DistFamily::student_t: {
      boost::math::students_t_distribution<double> d(p1_);
      return p2_ * boost::math::quantile(d, p);
    }
    case DistFamily::uniform:
      return (p - 0.5) * (p2_ - p1_);
  }
  throw std::logic_error("unreachable distribution family");
}

double DistributionSpec::sample(RngStream& rng) const {
  switch (family_) {
    case DistFamily::gaussian:
      return p1_ + p2_ * rng.normal();
    case DistFamily::student_t:
      return mean_ + p2_ * sample_student_t(rng, p1_);
    case DistFamily::uniform:
      return p1_ + (p2_ - p1_) * rng.uniform01();
  }
  throw std::logic_error("unreachable distribution family");
}

DistributionSpec DistributionSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("distribution: expected an object");
  }
  try {
    const std::string family = j.at("family").get<std::string>();
    if (family == "gaussian") {
      check_keys(j, {"family", "mean", "stddev"});
      return gaussian(j.at("mean").get<double>(), j.at("stddev").get<double>());
    }
    if (family == "student_t") {
      check_keys(j, {"family", "dof", "location", "scale"});
      return student_t(j.at("dof").get<double>(),
                       j.at("location").get<double>(),
                       j.at("scale").get<double>());
    }
    if (family == "uniform") {
      check_keys(j, {"family", "lo", "hi"});
      return uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
    }
    throw std::invalid_argument("distribution: unknown family '" + family +
                                "'");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("distribution: ") + e.what());
  }
}

nlohmann::json DistributionSpec::to_json() const {
  switch (family_) {
    case DistFamily::gaussian:
      return {{"family", "gaussian"}, {"mean", p1_}, {"stddev", p2_}};
    case DistFamily::student_t:
      return {{"family", "student_t"},
              {"dof", p1_},
              {"location", mean_},
              {"scale", p2_}};
    case DistFamily::uniform:
      return {{"family", "uniform"}, {"lo", p1_}, {"hi", p2_}};
  }
  throw std::logic_error("unreachable distribution family");
}

}  // namespace rmean

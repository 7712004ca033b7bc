#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "rmean/distribution.hpp"

using namespace rmean;

TEST_CASE("gaussian centered quantiles match the normal ppf") {
  const auto d = DistributionSpec::gaussian(3.0, 2.0);
  CHECK(d.mean() == 3.0);
  CHECK(d.stddev() == 2.0);
  // Reference: standard normal ppf(0.1) = -1.2815515655446004.
  CHECK(d.centered_quantile(0.1) ==
        doctest::Approx(2.0 * -1.2815515655446004).epsilon(1e-12));
  CHECK(d.centered_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.centered_quantile(0.9) ==
        doctest::Approx(-d.centered_quantile(0.1)).epsilon(1e-12));
}

TEST_CASE("uniform centered quantiles are linear") {
  const auto d = DistributionSpec::uniform(-1.0, 1.0);
  CHECK(d.mean() == 0.0);
  CHECK(d.stddev() == doctest::Approx(2.0 / std::sqrt(12.0)).epsilon(1e-14));
  CHECK(d.centered_quantile(0.25) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(d.centered_quantile(0.75) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("student_t has location-scale variance and symmetric quantiles") {
  const auto d = DistributionSpec::student_t(5.0, 1.0, 1.0);
  CHECK(d.mean() == 1.0);
  // sqrt(5/3)
  CHECK(d.stddev() == doctest::Approx(1.2909944487358056).epsilon(1e-12));
  CHECK(d.centered_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.centered_quantile(0.9) ==
        doctest::Approx(-d.centered_quantile(0.1)).epsilon(1e-12));
  CHECK(d.centered_quantile(0.95) > d.centered_quantile(0.9));
}

TEST_CASE("gaussian sampling moments") {
  const auto d = DistributionSpec::gaussian(2.0, 3.0);
  RngStream rng(11);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = d.sample(rng);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean - 2.0) < 0.05);
  CHECK(std::abs(std::sqrt(var) - 3.0) < 0.05);
}

TEST_CASE("uniform sampling stays in range with correct moments") {
  const auto d = DistributionSpec::uniform(-2.0, 5.0);
  RngStream rng(12);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = d.sample(rng);
    CHECK(x >= -2.0);
    CHECK(x < 5.0);
    sum += x;
  }
  CHECK(std::abs(sum / n - 1.5) < 0.02);
}

TEST_CASE("student_t sampling moments") {
  const auto d = DistributionSpec::student_t(5.0, 0.0, 1.0);
  RngStream rng(13);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = d.sample(rng);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 5.0 / 3.0) < 0.1);
}

TEST_CASE("degenerate gaussian is a point mass") {
  const auto d = DistributionSpec::gaussian(7.0, 0.0);
  RngStream rng(14);
  for (int i = 0; i < 100; ++i) CHECK(d.sample(rng) == 7.0);
  CHECK(d.centered_quantile(0.3) == 0.0);
}

TEST_CASE("sampling is reproducible per seed") {
  const auto d = DistributionSpec::student_t(4.0, -1.0, 2.0);
  RngStream a(77), b(77);
  for (int i = 0; i < 1000; ++i) CHECK(d.sample(a) == d.sample(b));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(DistributionSpec::gaussian(0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::student_t(2.0, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::student_t(5.0, 0.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::uniform(1.0, -1.0), std::invalid_argument);
  const auto d = DistributionSpec::gaussian(0.0, 1.0);
  CHECK_THROWS_AS(d.centered_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(d.centered_quantile(1.0), std::domain_error);
}

TEST_CASE("json round trip and strictness") {
  for (const auto& d :
       {DistributionSpec::gaussian(1.5, 0.5),
        DistributionSpec::student_t(6.0, -2.0, 3.0),
        DistributionSpec::uniform(0.0, 4.0)}) {
    const auto back = DistributionSpec::from_json(d.to_json());
    CHECK(back.family() == d.family());
    CHECK(back.mean() == d.mean());
    CHECK(back.stddev() == d.stddev());
  }
  const nlohmann::json bad = {{"family", "gaussian"},
                              {"mean", 0.0},
                              {"stddev", 1.0},
                              {"extra", 1}};
  CHECK_THROWS_AS(DistributionSpec::from_json(bad), std::invalid_argument);
  const nlohmann::json unknown = {{"family", "cauchy"}, {"scale", 1.0}};
  CHECK_THROWS_AS(DistributionSpec::from_json(unknown), std::invalid_argument);
}

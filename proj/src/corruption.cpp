#include "rmean/corruption.hpp"

#include <cmath>
#include <stdexcept>

namespace rmean {

namespace {

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
      throw std::invalid_argument("adversary: unknown key '" + item.key() + "'");
    }
  }
}

}  // namespace

std::string to_string(AdversaryStrategy strategy) {
  switch (strategy) {
    case AdversaryStrategy::none:
      return "none";
    case AdversaryStrategy::fixed_distribution:
      return "fixed_distribution";
    case AdversaryStrategy::constant_value:
      return "constant_value";
    case AdversaryStrategy::max_bias:
      return "max_bias";
  }
  throw std::logic_error("unreachable adversary strategy");
}

AdversarySpec AdversarySpec::none_spec() { return AdversarySpec{}; }

AdversarySpec AdversarySpec::fixed_distribution_spec(double eta,
                                                     DistributionSpec d) {
  AdversarySpec spec;
  spec.strategy = AdversaryStrategy::fixed_distribution;
  spec.eta = eta;
  spec.distribution = std::move(d);
  spec.validate();
  return spec;
}

AdversarySpec AdversarySpec::constant_value_spec(double eta, double value) {
  AdversarySpec spec;
  spec.strategy = AdversaryStrategy::constant_value;
  spec.eta = eta;
  spec.value = value;
  spec.validate();
  return spec;
}

AdversarySpec AdversarySpec::max_bias_spec(double eta, int direction) {
  AdversarySpec spec;
  spec.strategy = AdversaryStrategy::max_bias;
  spec.eta = eta;
  spec.direction = direction;
  spec.validate();
  return spec;
}

void AdversarySpec::validate() const {
  if (strategy == AdversaryStrategy::none) {
    if (eta != 0.0) {
      throw std::invalid_argument("adversary: strategy 'none' requires eta = 0");
    }
    return;
  }
  if (!(std::isfinite(eta) && eta >= 0.0 && eta < 1.0)) {
    throw std::invalid_argument("adversary: eta must lie in [0, 1)");
  }
  switch (strategy) {
    case AdversaryStrategy::fixed_distribution:
      if (!distribution) {
        throw std::invalid_argument(
            "adversary: fixed_distribution requires a distribution");
      }
      break;
    case AdversaryStrategy::constant_value:
      if (!std::isfinite(value)) {
        throw std::invalid_argument(
            "adversary: constant_value must be finite");
      }
      break;
    case AdversaryStrategy::max_bias:
      if (direction != 1 && direction != -1) {
        throw std::invalid_argument(
            "adversary: max_bias direction must be +1 or -1");
      }
      break;
    case AdversaryStrategy::none:
      break;
  }
}

AdversarySpec AdversarySpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("adversary: expected an object");
  }
  try {
    const std::string strategy = j.at("strategy").get<std::string>();
    if (strategy == "none") {
      check_keys(j, {"strategy"});
      return none_spec();
    }
    const double eta = j.at("eta").get<double>();
    if (strategy == "fixed_distribution") {
      check_keys(j, {"strategy", "eta", "distribution"});
      return fixed_distribution_spec(
          eta, DistributionSpec::from_json(j.at("distribution")));
    }
    if (strategy == "constant_value") {
      check_keys(j, {"strategy", "eta", "value"});
      return constant_value_spec(eta, j.at("value").get<double>());
    }
    if (strategy == "max_bias") {
      check_keys(j, {"strategy", "eta", "direction"});
      return max_bias_spec(eta, j.at("direction").get<int>());
    }
    throw std::invalid_argument("adversary: unknown strategy '" + strategy +
                                "'");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("adversary: ") + e.what());
  }
}

nlohmann::json AdversarySpec::to_json() const {
  switch (strategy) {
    case AdversaryStrategy::none:
      return {{"strategy", "none"}};
    case AdversaryStrategy::fixed_distribution:
      return {{"strategy", "fixed_distribution"},
              {"eta", eta},
              {"distribution", distribution->to_json()}};
    case AdversaryStrategy::constant_value:
      return {{"strategy", "constant_value"}, {"eta", eta}, {"value", value}};
    case AdversaryStrategy::max_bias:
      return {{"strategy", "max_bias"}, {"eta", eta}, {"direction", direction}};
  }
  throw std::logic_error("unreachable adversary strategy");
}

bool corruption_due(double eta, std::int64_t t) {
  if (t < 1) throw std::domain_error("corruption_due: t must be >= 1");
  const double now = std::floor(eta * static_cast<double>(t));
  const double before = std::floor(eta * static_cast<double>(t - 1));
  return now > before;
}

Adversary::Adversary(AdversarySpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {
  spec_.validate();
}

StreamRecord Adversary::intercept(std::int64_t t, double clean_value,
                                  const TrimBounds* victim_bounds) {
  if (t != next_time_) {
    throw std::logic_error("Adversary::intercept: steps must arrive in order");
  }
  ++next_time_;

  StreamRecord record;
  record.time = t;
  record.clean_value = clean_value;
  record.emitted_value = clean_value;
  record.corrupted = false;
  if (spec_.strategy == AdversaryStrategy::none || spec_.eta == 0.0 ||
      !corruption_due(spec_.eta, t)) {
    return record;
  }

  record.corrupted = true;
  ++corrupted_count_;
  switch (spec_.strategy) {
    case AdversaryStrategy::fixed_distribution:
      record.emitted_value = spec_.distribution->sample(rng_);
      break;
    case AdversaryStrategy::constant_value:
      record.emitted_value = spec_.value;
      break;
    case AdversaryStrategy::max_bias:
      if (victim_bounds) {
        record.emitted_value = spec_.direction > 0 ? victim_bounds->beta + 1.0
                                                   : victim_bounds->alpha - 1.0;
      } else {
        ++missing_context_;
        record.emitted_value = spec_.direction * kFallbackMagnitude;
      }
      break;
    case AdversaryStrategy::none:
      break;  // unreachable: handled above
  }
  return record;
}

CorruptedStream::CorruptedStream(DistributionSpec dist, AdversarySpec adversary,
                                 std::uint64_t clean_seed,
                                 std::uint64_t adversary_seed)
    : dist_(std::move(dist)),
      clean_rng_(clean_seed),
      adversary_(std::move(adversary), adversary_seed) {}

StreamRecord CorruptedStream::next(const TrimBounds* victim_bounds) {
  ++t_;
  const double clean = dist_.sample(clean_rng_);
  return adversary_.intercept(t_, clean, victim_bounds);
}

}  // namespace rmean

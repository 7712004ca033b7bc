#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "rmean/distribution.hpp"
#include "rmean/estimator.hpp"
#include "rmean/rng.hpp"

namespace rmean {

enum class AdversaryStrategy { none, fixed_distribution, constant_value, max_bias };

std::string to_string(AdversaryStrategy strategy);

// How a stream is corrupted. The schedule is deterministic: step t is
// corrupted iff floor(eta*t) > floor(eta*(t-1)), which keeps every prefix
// within the floor(eta*t) budget and spends it as early as allowed.
struct AdversarySpec {
  AdversaryStrategy strategy = AdversaryStrategy::none;
  double eta = 0.0;                           // corrupted fraction, in [0, 1)
  std::optional<DistributionSpec> distribution;  // fixed_distribution payload
  double value = 0.0;                         // constant_value payload
  int direction = 1;                          // max_bias: +1 or -1

  static AdversarySpec none_spec();
  static AdversarySpec fixed_distribution_spec(double eta, DistributionSpec d);
  static AdversarySpec constant_value_spec(double eta, double value);
  static AdversarySpec max_bias_spec(double eta, int direction);

  void validate() const;
  static AdversarySpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// What a stream emitted at one step.
struct StreamRecord {
  std::int64_t time = 0;
  double clean_value = 0.0;
  double emitted_value = 0.0;
  bool corrupted = false;
};

// True iff the schedule corrupts step t at rate eta.
bool corruption_due(double eta, std::int64_t t);

// Replaces scheduled samples according to the strategy. The max_bias strategy
// reads the victim's current trimming thresholds when they are offered and
// emits a value just outside them; without thresholds it falls back to a
// fixed extreme value and counts the event.
class Adversary {
 public:
  Adversary(AdversarySpec spec, std::uint64_t seed);

  // Steps must be fed in order: t = 1, 2, ...
  StreamRecord intercept(std::int64_t t, double clean_value,
                         const TrimBounds* victim_bounds = nullptr);

  const AdversarySpec& spec() const { return spec_; }
  std::int64_t corrupted_count() const { return corrupted_count_; }
  std::int64_t missing_context_events() const { return missing_context_; }

  // Fallback magnitude used by max_bias when no thresholds are offered.
  static constexpr double kFallbackMagnitude = 1e12;

 private:
  AdversarySpec spec_;
  RngStream rng_;
  std::int64_t next_time_ = 1;
  std::int64_t corrupted_count_ = 0;
  std::int64_t missing_context_ = 0;
};

// An i.i.d. stream from `dist` passed through an adversary. The clean source
// and the adversary use independent generators so corruption never perturbs
// the clean sequence.
class CorruptedStream {
 public:
  CorruptedStream(DistributionSpec dist, AdversarySpec adversary,
                  std::uint64_t clean_seed, std::uint64_t adversary_seed);

  StreamRecord next(const TrimBounds* victim_bounds = nullptr);

  const DistributionSpec& dist() const { return dist_; }
  std::int64_t time() const { return t_; }
  const Adversary& adversary() const { return adversary_; }

 private:
  DistributionSpec dist_;
  RngStream clean_rng_;
  Adversary adversary_;
  std::int64_t t_ = 0;
};

}  // namespace rmean

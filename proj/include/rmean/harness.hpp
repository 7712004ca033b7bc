#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmean/simulator.hpp"

namespace rmean {

// A full experiment: a scenario name, the data and corruption model, the
// estimator, the network, and the trial plan. Parsed strictly from JSON:
// unknown keys are rejected, required keys must be present.
struct ExperimentConfig {
  std::string scenario = "experiment";
  DistributionSpec dist = DistributionSpec::gaussian(0.0, 1.0);
  AdversarySpec adversary;
  RobustnessParams params{0.01, 0.1};
  LocalAlgorithm algorithm = LocalAlgorithm::fixed;
  std::int64_t t0 = 0;  // required iff algorithm == fixed
  std::string graph = "complete:1";
  int consensus_rounds = 0;
  std::int64_t horizon = 1;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool bounds = true;
  ThresholdDissemination dissemination = ThresholdDissemination::instant;
  int threshold_agent = 0;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

 private:
  static ExperimentConfig from_json_checked(const nlohmann::json& j);

 public:

  // Parse the graph field: "complete:M", "path:M", "cycle:M",
  // "random:M:PROB:SEED" or "file:PATH".
  Graph build_graph() const;

  SimulationConfig simulation() const;
};

// One trial's run plus the bound ingredients evaluated on it.
struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  RunResult run;
  double true_mean = 0.0;
  double sigma = 0.0;

  std::vector<double> bound_thm1;  // per step; NaN where not applicable
  std::vector<double> tail_sums;   // adaptive: running sum of U_j past t_bar
  std::int64_t t_bar = 0;          // 0 when diagnostics were not collected
  std::vector<double> err_at_tbar;  // per agent, |estimate(t_bar) - mean|

  // Theorem-2 bound for one agent at step t (1-based); NaN if unavailable.
  double bound_thm2(std::int64_t t, int agent) const;
};

struct WilsonInterval {
  double lo;
  double hi;
};

// Wilson score interval for `successes` out of `n` at normal quantile z.
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t n,
                               double z = 1.96);

struct BoundCheck {
  std::string name;
  std::int64_t n = 0;          // observations examined
  std::int64_t successes = 0;  // observations within the bound
  double coverage = 0.0;
  double target = 0.0;  // required coverage
  WilsonInterval wilson{0.0, 0.0};
  bool pass = false;
  std::string note;

  nlohmann::json to_json() const;
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  bool all_pass() const;
  nlohmann::json to_json() const;
};

// Run all trials; records are returned in trial order regardless of the
// thread count. threads <= 0 picks the hardware concurrency.
std::vector<TrialRecord> run_trials(const ExperimentConfig& config,
                                    int threads);

// Evaluate every bound check applicable to this configuration.
BoundReport verify_bounds(std::span<const TrialRecord> records,
                          const ExperimentConfig& config);

// Pinned trajectory format, one row per (t, agent, k):
// t,agent,k,estimate,error,corrupted,eps_t,alpha,beta,bound_thm1,bound_thm2
// Floats use "%.17g"; undefined cells are left empty.
void emit_csv(const TrialRecord& record, std::ostream& out);

// Compact per-run summary used by `verify`: config echo, graph facts,
// per-trial terminal data and the bound report. Contains no wall-clock data,
// so reruns are byte-identical.
nlohmann::json make_summary(const ExperimentConfig& config,
                            std::span<const TrialRecord> records,
                            const BoundReport& report);

// Run trials, verify bounds, write trial_NNNNN.csv files plus summary.json
// under config.out_dir.
BoundReport run_experiment(const ExperimentConfig& config, int threads);

// Recheck a stored summary.json: recompute every check from the per-trial
// data and compare with the stored verdicts. Returns the recomputed report;
// `consistent` reports whether it matches the stored one.
BoundReport reverify_summary(const nlohmann::json& summary, bool* consistent);

}  // namespace rmean

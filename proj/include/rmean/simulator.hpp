#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmean/consensus.hpp"
#include "rmean/corruption.hpp"
#include "rmean/distribution.hpp"
#include "rmean/estimator.hpp"
#include "rmean/graph.hpp"

namespace rmean {

enum class LocalAlgorithm { fixed, adaptive };
enum class ThresholdDissemination { instant, flooding };

std::string to_string(LocalAlgorithm algorithm);
std::string to_string(ThresholdDissemination mode);
LocalAlgorithm local_algorithm_from_string(const std::string& name);
ThresholdDissemination dissemination_from_string(const std::string& name);

struct SimulationConfig {
  LocalAlgorithm algorithm = LocalAlgorithm::fixed;
  std::int64_t t0 = 0;  // warm-up length; fixed algorithm only
  int consensus_rounds = 0;
  std::int64_t horizon = 0;
  int threshold_agent = 0;  // the agent whose reference data sets thresholds
  ThresholdDissemination dissemination = ThresholdDissemination::instant;
  bool record_rounds = true;  // keep per-round values k = 0..K at every step
  bool diagnostics = false;   // adaptive only: per-step threshold checks
};

// Everything one agent produced over a run. Entries are NaN at times where
// the quantity is not yet defined (warm-up / before thresholds arrive).
struct AgentSeries {
  std::vector<double> estimate;               // post-consensus value per step
  std::vector<std::vector<double>> rounds;    // [t-1][k], k = 0..K
  std::vector<std::uint8_t> corrupted;        // sample-stream corruption flags
  std::vector<double> naive_mean;             // running mean of raw samples
  std::int64_t corrupted_total = 0;
};

struct RunResult {
  int m = 0;
  int consensus_rounds = 0;
  std::int64_t horizon = 0;
  std::vector<AgentSeries> agents;
  std::vector<double> epsilon;         // trimming rate in force at each step
  std::vector<double> alpha;           // thresholds published by the
  std::vector<double> beta;            //   threshold agent
  std::vector<double> group_uniform;   // uniform mean of pre-consensus values
  std::vector<double> group_weighted;  // stationary-weighted mean of the same
  DiagnosticsRecord diagnostics;       // empty unless enabled
  bool pre_asymptotic_thresholds = false;
};

// Seed layout: agent i draws its sample stream from
// derive_seed(trial_seed, 4*i) (clean) and 4*i+1 (adversary); its reference
// stream uses 4*i+2 and 4*i+3. Every agent consumes its own streams only, so
// results are independent of agent iteration order.
std::uint64_t agent_stream_seed(std::uint64_t trial_seed, int agent,
                                int stream);

// Run the distributed estimator on `graph` for sim.horizon steps.
// `adversaries` holds either a single spec applied to every agent or one
// spec per agent. Sample and reference streams are corrupted independently,
// each under its own floor(eta*t) budget.
RunResult distributed_run(const Graph& graph, const PerronMatrix& matrix,
                          const RobustnessParams& params,
                          const SimulationConfig& sim,
                          std::span<const AdversarySpec> adversaries,
                          const DistributionSpec& dist,
                          std::uint64_t trial_seed);

}  // namespace rmean

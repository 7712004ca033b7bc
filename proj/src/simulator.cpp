#include "rmean/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmean {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate(const Graph& graph, const SimulationConfig& sim,
              std::size_t adversary_count) {
  const int m = graph.size();
  if (sim.horizon < 1) {
    throw std::invalid_argument("distributed_run: horizon must be >= 1");
  }
  if (sim.consensus_rounds < 0) {
    throw std::invalid_argument("distributed_run: consensus rounds must be >= 0");
  }
  if (sim.threshold_agent < 0 || sim.threshold_agent >= m) {
    throw std::invalid_argument("distributed_run: threshold agent out of range");
  }
  if (sim.algorithm == LocalAlgorithm::fixed) {
    if (sim.t0 < 1) {
      throw std::invalid_argument("distributed_run: t0 must be >= 1");
    }
    if (sim.horizon <= sim.t0) {
      throw std::invalid_argument("distributed_run: horizon must exceed t0");
    }
  }
  if (adversary_count != 1 && adversary_count != static_cast<std::size_t>(m)) {
    throw std::invalid_argument(
        "distributed_run: need one adversary spec, or one per agent");
  }
}

const AdversarySpec& adversary_for(std::span<const AdversarySpec> specs,
                                   int agent) {
  return specs.size() == 1 ? specs[0]
                           : specs[static_cast<std::size_t>(agent)];
}

}  // namespace

std::string to_string(LocalAlgorithm algorithm) {
  switch (algorithm) {
    case LocalAlgorithm::fixed:
      return "fixed";
    case LocalAlgorithm::adaptive:
      return "adaptive";
  }
  throw std::logic_error("unreachable algorithm");
}

std::string to_string(ThresholdDissemination mode) {
  switch (mode) {
    case ThresholdDissemination::instant:
      return "instant";
    case ThresholdDissemination::flooding:
      return "flooding";
  }
  throw std::logic_error("unreachable dissemination mode");
}

LocalAlgorithm local_algorithm_from_string(const std::string& name) {
  if (name == "fixed") return LocalAlgorithm::fixed;
  if (name == "adaptive") return LocalAlgorithm::adaptive;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

ThresholdDissemination dissemination_from_string(const std::string& name) {
  if (name == "instant") return ThresholdDissemination::instant;
  if (name == "flooding") return ThresholdDissemination::flooding;
  throw std::invalid_argument("unknown dissemination mode '" + name + "'");
}

std::uint64_t agent_stream_seed(std::uint64_t trial_seed, int agent,
                                int stream) {
  return derive_seed(trial_seed, 4ULL * static_cast<std::uint64_t>(agent) +
                                     static_cast<std::uint64_t>(stream));
}

RunResult distributed_run(const Graph& graph, const PerronMatrix& matrix,
                          const RobustnessParams& params,
                          const SimulationConfig& sim,
                          std::span<const AdversarySpec> adversaries,
                          const DistributionSpec& dist,
                          std::uint64_t trial_seed) {
  validate(graph, sim, adversaries.size());
  const int m = graph.size();
  const int K = sim.consensus_rounds;
  const std::int64_t T = sim.horizon;
  const int o = sim.threshold_agent;
  const bool adaptive = sim.algorithm == LocalAlgorithm::adaptive;
  const bool flooding = sim.dissemination == ThresholdDissemination::flooding;

  RunResult result;
  result.m = m;
  result.consensus_rounds = K;
  result.horizon = T;
  result.agents.resize(static_cast<std::size_t>(m));
  for (auto& agent : result.agents) {
    agent.estimate.assign(static_cast<std::size_t>(T), kNaN);
    agent.corrupted.assign(static_cast<std::size_t>(T), 0);
    agent.naive_mean.assign(static_cast<std::size_t>(T), kNaN);
    if (sim.record_rounds) {
      agent.rounds.assign(static_cast<std::size_t>(T),
                          std::vector<double>(static_cast<std::size_t>(K) + 1,
                                              kNaN));
    }
  }
  result.epsilon.assign(static_cast<std::size_t>(T), kNaN);
  result.alpha.assign(static_cast<std::size_t>(T), kNaN);
  result.beta.assign(static_cast<std::size_t>(T), kNaN);
  result.group_uniform.assign(static_cast<std::size_t>(T), kNaN);
  result.group_weighted.assign(static_cast<std::size_t>(T), kNaN);

  // Streams. Sample streams exist for every agent; reference streams only for
  // the adaptive algorithm.
  std::vector<CorruptedStream> sample_streams;
  std::vector<CorruptedStream> reference_streams;
  sample_streams.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    sample_streams.emplace_back(dist, adversary_for(adversaries, i),
                                agent_stream_seed(trial_seed, i, 0),
                                agent_stream_seed(trial_seed, i, 1));
  }
  if (adaptive) {
    reference_streams.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      reference_streams.emplace_back(dist, adversary_for(adversaries, i),
                                     agent_stream_seed(trial_seed, i, 2),
                                     agent_stream_seed(trial_seed, i, 3));
    }
  }

  // Hop delay until thresholds from the threshold agent become usable.
  std::vector<int> delay(static_cast<std::size_t>(m), 0);
  if (flooding) delay = graph.bfs_distances(o);

  // Per-agent state.
  std::vector<double> state(static_cast<std::size_t>(m), 0.0);
  std::vector<double> naive(static_cast<std::size_t>(m), 0.0);

  // Threshold machinery. `published` is the threshold agent's history,
  // indexed by the step it was computed at (adaptive; fixed keeps one entry).
  OrderStatMultiset warmup_reference;            // fixed: threshold agent only
  std::vector<OrderStatMultiset> own_reference;  // adaptive
  std::vector<TrimBounds> published;
  bool thresholds_ready = false;  // fixed: warm-up finished
  std::vector<double> clean_reference;  // diagnostics: clean y of agent o
  if (adaptive) {
    own_reference.resize(
        flooding ? static_cast<std::size_t>(m) : 1);  // [0] is agent o's
  }
  if (sim.diagnostics && adaptive) {
    clean_reference.reserve(static_cast<std::size_t>(T));
    result.diagnostics.bad_event.reserve(static_cast<std::size_t>(T));
  }

  // Availability: first step at which agent i has an estimate.
  std::vector<std::int64_t> first_estimate_at(static_cast<std::size_t>(m), 1);
  if (!adaptive) {
    for (int i = 0; i < m; ++i) {
      first_estimate_at[static_cast<std::size_t>(i)] =
          sim.t0 + static_cast<std::int64_t>(delay[static_cast<std::size_t>(i)]) + 1;
    }
  }
  const std::int64_t all_estimates_at =
      *std::max_element(first_estimate_at.begin(), first_estimate_at.end());

  // Bounds the sample-stream adversary of agent i can observe at step t
  // (thresholds in force before this step's update).
  auto bounds_known_to = [&](int i, std::int64_t t) -> const TrimBounds* {
    if (!adaptive) {
      return thresholds_ready ? &published[0] : nullptr;
    }
    const std::int64_t lag = flooding ? delay[static_cast<std::size_t>(i)] : 0;
    const std::int64_t idx = t - 1 - lag;  // last published step visible to i
    if (idx >= 1) return &published[static_cast<std::size_t>(idx - 1)];
    return nullptr;
  };

  std::vector<double> round_values(static_cast<std::size_t>(m));
  std::vector<std::uint8_t> defined(static_cast<std::size_t>(m), 0);

  for (std::int64_t t = 1; t <= T; ++t) {
    const std::size_t ti = static_cast<std::size_t>(t - 1);

    // Draw this step's samples for every agent.
    std::vector<StreamRecord> samples;
    samples.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      samples.push_back(
          sample_streams[static_cast<std::size_t>(i)].next(bounds_known_to(i, t)));
      auto& agent = result.agents[static_cast<std::size_t>(i)];
      agent.corrupted[ti] = samples.back().corrupted ? 1 : 0;
      agent.corrupted_total += agent.corrupted[ti];
      naive[static_cast<std::size_t>(i)] = recursive_mean_update(
          naive[static_cast<std::size_t>(i)], samples.back().emitted_value, t);
      agent.naive_mean[ti] = naive[static_cast<std::size_t>(i)];
    }

    // Threshold maintenance.
    if (adaptive) {
      for (int i = 0; i < m; ++i) {
        if (!flooding && i != o) {
          // Reference draw is consumed even when the multiset is not kept,
          // so stream contents do not depend on the dissemination mode.
          reference_streams[static_cast<std::size_t>(i)].next(
              bounds_known_to(i, t));
          continue;
        }
        const StreamRecord rec =
            reference_streams[static_cast<std::size_t>(i)].next(
                bounds_known_to(i, t));
        own_reference[flooding ? static_cast<std::size_t>(i) : 0].insert(
            rec.emitted_value);
        if (i == o && sim.diagnostics) {
          clean_reference.push_back(rec.clean_value);
        }
      }
      const double eps = compute_epsilon(params, t);
      result.epsilon[ti] = eps;
      const auto& o_set = own_reference[flooding ? static_cast<std::size_t>(o) : 0];
      published.push_back(trimming_thresholds_capped(o_set, eps));
      result.alpha[ti] = published.back().alpha;
      result.beta[ti] = published.back().beta;
      if (sim.diagnostics) {
        bool bad = true;
        if (eps < 0.5) {
          bad = lemma1_diagnostics(clean_reference, dist, eps).bad_event;
        }
        result.diagnostics.bad_event.push_back(bad ? 1 : 0);
      }
    } else {
      if (t <= sim.t0) {
        // Every agent drew a sample; only the threshold agent's are kept.
        warmup_reference.insert(samples[static_cast<std::size_t>(o)].emitted_value);
        if (t == sim.t0) {
          const double eps = compute_epsilon(params, sim.t0);
          result.pre_asymptotic_thresholds = epsilon_degenerate(eps);
          published.push_back(
              trimming_thresholds_capped(warmup_reference, eps));
          thresholds_ready = true;
          warmup_reference.clear();
        }
      }
      if (thresholds_ready) {
        result.epsilon[ti] = compute_epsilon(params, sim.t0);
        result.alpha[ti] = published[0].alpha;
        result.beta[ti] = published[0].beta;
      }
    }

    // Local updates.
    for (int i = 0; i < m; ++i) {
      const std::size_t ai = static_cast<std::size_t>(i);
      const std::int64_t start = first_estimate_at[ai];
      if (t < start) continue;
      TrimBounds fallback{0.0, 0.0};
      const TrimBounds* bounds = nullptr;
      if (adaptive) {
        const std::int64_t lag = flooding ? delay[ai] : 0;
        if (t - lag >= 1) {
          bounds = &published[static_cast<std::size_t>(t - lag - 1)];
        } else {
          // Thresholds from the designated agent have not arrived yet; fall
          // back to the agent's own reference data.
          fallback = trimming_thresholds_capped(own_reference[ai],
                                                compute_epsilon(params, t));
          bounds = &fallback;
        }
      } else {
        bounds = &published[0];
      }
      const double clamped =
          trim_clamp(*bounds, samples[ai].emitted_value);
      const std::int64_t n = adaptive ? t : t - (start - 1);
      state[ai] = recursive_mean_update(state[ai], clamped, n);
      defined[ai] = 1;
    }

    // Consensus rounds; run once every agent holds an estimate.
    const bool all_defined = t >= all_estimates_at;
    for (int i = 0; i < m; ++i) {
      round_values[static_cast<std::size_t>(i)] =
          defined[static_cast<std::size_t>(i)] ? state[static_cast<std::size_t>(i)]
                                               : kNaN;
    }
    if (sim.record_rounds) {
      for (int i = 0; i < m; ++i) {
        result.agents[static_cast<std::size_t>(i)].rounds[ti][0] =
            round_values[static_cast<std::size_t>(i)];
      }
    }
    if (all_defined) {
      result.group_uniform[ti] = uniform_average(round_values);
      result.group_weighted[ti] =
          consensus_fixed_point(matrix, round_values).value;
    }
    if (all_defined && K > 0) {
      for (int k = 1; k <= K; ++k) {
        round_values = consensus_round(matrix, round_values);
        if (sim.record_rounds) {
          for (int i = 0; i < m; ++i) {
            result.agents[static_cast<std::size_t>(i)].rounds[ti][static_cast<std::size_t>(k)] =
                round_values[static_cast<std::size_t>(i)];
          }
        }
      }
      for (int i = 0; i < m; ++i) {
        state[static_cast<std::size_t>(i)] =
            round_values[static_cast<std::size_t>(i)];
      }
    }
    for (int i = 0; i < m; ++i) {
      const std::size_t ai = static_cast<std::size_t>(i);
      if (defined[ai]) result.agents[ai].estimate[ti] = state[ai];
    }
  }

  return result;
}

}  // namespace rmean

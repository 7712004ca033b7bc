#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rmean/simulator.hpp"

using namespace rmean;

namespace {

const DistributionSpec kGauss = DistributionSpec::gaussian(0.0, 1.0);

RunResult run_single_spec(const Graph& graph, const RobustnessParams& params,
                          const SimulationConfig& sim, const AdversarySpec& adv,
                          std::uint64_t trial_seed,
                          const DistributionSpec& dist = kGauss) {
  const PerronMatrix matrix(graph);
  const AdversarySpec specs[1] = {adv};
  return distributed_run(graph, matrix, params, sim, specs, dist, trial_seed);
}

}  // namespace

TEST_CASE("enum round trips") {
  CHECK(local_algorithm_from_string("fixed") == LocalAlgorithm::fixed);
  CHECK(local_algorithm_from_string("adaptive") == LocalAlgorithm::adaptive);
  CHECK(to_string(LocalAlgorithm::fixed) == "fixed");
  CHECK_THROWS_AS(local_algorithm_from_string("bogus"), std::invalid_argument);
  CHECK(dissemination_from_string("instant") == ThresholdDissemination::instant);
  CHECK(dissemination_from_string("flooding") ==
        ThresholdDissemination::flooding);
  CHECK(to_string(ThresholdDissemination::flooding) == "flooding");
  CHECK_THROWS_AS(dissemination_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("input validation") {
  const Graph g5 = Graph::complete(5);
  const PerronMatrix P5(g5);
  const RobustnessParams params(0.02, 0.3);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = 10;
  const AdversarySpec one[1] = {AdversarySpec::none_spec()};

  {
    SimulationConfig bad = sim;
    bad.horizon = 0;
    CHECK_THROWS_AS(distributed_run(g5, P5, params, bad, one, kGauss, 1),
                    std::invalid_argument);
  }
  {
    SimulationConfig bad = sim;
    bad.threshold_agent = 5;
    CHECK_THROWS_AS(distributed_run(g5, P5, params, bad, one, kGauss, 1),
                    std::invalid_argument);
  }
  {
    SimulationConfig bad = sim;
    bad.algorithm = LocalAlgorithm::fixed;
    bad.t0 = 10;  // t0 >= horizon
    CHECK_THROWS_AS(distributed_run(g5, P5, params, bad, one, kGauss, 1),
                    std::invalid_argument);
    bad.t0 = 0;
    CHECK_THROWS_AS(distributed_run(g5, P5, params, bad, one, kGauss, 1),
                    std::invalid_argument);
  }
  {
    const std::vector<AdversarySpec> three(3, AdversarySpec::none_spec());
    CHECK_THROWS_AS(distributed_run(g5, P5, params, sim, three, kGauss, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("single agent, fixed thresholds: matches the standalone estimator") {
  const RobustnessParams params(0.02, 0.3);
  const std::int64_t t0 = 50;
  const std::int64_t T = 300;
  const Graph g = Graph::complete(1);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::fixed;
  sim.t0 = t0;
  sim.horizon = T;
  sim.consensus_rounds = 1;  // averaging over one agent must be a no-op

  const AdversarySpec adv = AdversarySpec::fixed_distribution_spec(
      0.05, DistributionSpec::gaussian(40.0, 1.0));
  const std::uint64_t trial_seed = 991;
  const RunResult run = run_single_spec(g, params, sim, adv, trial_seed);

  // Replay the same stream through the standalone estimator.
  FixedTrimEstimator est(params, t0);
  CorruptedStream stream(kGauss, adv, agent_stream_seed(trial_seed, 0, 0),
                         agent_stream_seed(trial_seed, 0, 1));
  const auto& agent = run.agents[0];
  for (std::int64_t t = 1; t <= T; ++t) {
    // The driver exposes thresholds only once warm-up has finished, matching
    // what a fixed-threshold victim can leak.
    const TrimBounds* known = est.warmed_up() ? &est.bounds() : nullptr;
    const StreamRecord rec = stream.next(known);
    est.observe(rec.emitted_value);
    const std::size_t ti = static_cast<std::size_t>(t - 1);
    CHECK(agent.corrupted[ti] == (rec.corrupted ? 1 : 0));
    if (t <= t0) {
      CHECK(std::isnan(agent.estimate[ti]));
    } else {
      // Bitwise equality: both paths run the same update code on the same
      // stream values.
      CHECK(agent.estimate[ti] == *est.estimate());
    }
  }
  CHECK(run.alpha[static_cast<std::size_t>(t0 - 1)] == est.bounds().alpha);
  CHECK(run.beta[static_cast<std::size_t>(T - 1)] == est.bounds().beta);
  CHECK(run.epsilon[static_cast<std::size_t>(T - 1)] == est.epsilon());
  CHECK(run.pre_asymptotic_thresholds == est.pre_asymptotic());
}

TEST_CASE("single agent, adaptive thresholds: matches the standalone estimator") {
  const RobustnessParams params(0.02, 0.3);
  const std::int64_t T = 400;
  const Graph g = Graph::complete(1);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = T;
  sim.consensus_rounds = 2;  // still a no-op on one agent

  const AdversarySpec adv = AdversarySpec::max_bias_spec(0.04, +1);
  const std::uint64_t trial_seed = 1234;
  const RunResult run = run_single_spec(g, params, sim, adv, trial_seed);

  AdaptiveTrimEstimator est(params);
  CorruptedStream x_stream(kGauss, adv, agent_stream_seed(trial_seed, 0, 0),
                           agent_stream_seed(trial_seed, 0, 1));
  CorruptedStream y_stream(kGauss, adv, agent_stream_seed(trial_seed, 0, 2),
                           agent_stream_seed(trial_seed, 0, 3));
  const auto& agent = run.agents[0];
  TrimBounds prev{0.0, 0.0};
  for (std::int64_t t = 1; t <= T; ++t) {
    // Adversaries see the thresholds published after the previous step.
    const TrimBounds* known = t == 1 ? nullptr : &prev;
    const StreamRecord x = x_stream.next(known);
    const StreamRecord y = y_stream.next(known);
    est.step(x.emitted_value, y.emitted_value);
    prev = est.bounds();
    const std::size_t ti = static_cast<std::size_t>(t - 1);
    CHECK(agent.estimate[ti] == *est.estimate());
    CHECK(run.alpha[ti] == est.bounds().alpha);
    CHECK(run.beta[ti] == est.bounds().beta);
    CHECK(run.epsilon[ti] == est.epsilon());
    CHECK(agent.corrupted[ti] == (x.corrupted ? 1 : 0));
  }
}

TEST_CASE("complete graph with one round reaches exact agreement") {
  const RobustnessParams params(0.02, 0.3);
  const std::int64_t T = 120;
  const Graph g = Graph::complete(5);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = T;
  sim.consensus_rounds = 1;

  const RunResult run =
      run_single_spec(g, params, sim, AdversarySpec::none_spec(), 7);
  for (std::int64_t t = 1; t <= T; ++t) {
    const std::size_t ti = static_cast<std::size_t>(t - 1);
    // One round on the complete graph averages everything: all agents agree
    // and the common value is the uniform mean of the pre-round values.
    double pooled = 0.0;
    for (const auto& agent : run.agents) pooled += agent.rounds[ti][0];
    pooled /= 5.0;
    for (const auto& agent : run.agents) {
      CHECK(agent.estimate[ti] ==
            doctest::Approx(run.agents[0].estimate[ti]).epsilon(1e-12));
      CHECK(agent.estimate[ti] == doctest::Approx(pooled).epsilon(1e-12));
    }
    CHECK(run.group_uniform[ti] == doctest::Approx(pooled).epsilon(1e-12));
  }
}

TEST_CASE("per-round trajectory: the last recorded round is the estimate") {
  const RobustnessParams params(0.02, 0.3);
  const Graph g = Graph::path(4);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = 60;
  sim.consensus_rounds = 3;

  const RunResult run =
      run_single_spec(g, params, sim, AdversarySpec::none_spec(), 21);
  for (std::int64_t t = 1; t <= sim.horizon; ++t) {
    const std::size_t ti = static_cast<std::size_t>(t - 1);
    for (const auto& agent : run.agents) {
      REQUIRE(agent.rounds[ti].size() == 4);
      CHECK(agent.rounds[ti][3] == agent.estimate[ti]);
      for (double v : agent.rounds[ti]) CHECK_FALSE(std::isnan(v));
    }
  }
}

TEST_CASE("corruption counts respect the budget on every prefix") {
  const RobustnessParams params(0.02, 0.3);
  const Graph g = Graph::complete(3);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = 500;
  const double eta = 0.1;

  const RunResult run = run_single_spec(
      g, params, sim, AdversarySpec::constant_value_spec(eta, 50.0), 3);
  for (const auto& agent : run.agents) {
    std::int64_t seen = 0;
    for (std::int64_t t = 1; t <= sim.horizon; ++t) {
      seen += agent.corrupted[static_cast<std::size_t>(t - 1)];
      CHECK(seen <= static_cast<std::int64_t>(
                        std::floor(eta * static_cast<double>(t))));
    }
    CHECK(agent.corrupted_total == seen);
    CHECK(agent.corrupted_total ==
          static_cast<std::int64_t>(std::floor(eta * 500.0)));
  }
}

TEST_CASE("naive running mean tracks the raw emitted samples") {
  const RobustnessParams params(0.02, 0.3);
  const Graph g = Graph::complete(1);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = 200;
  const AdversarySpec adv = AdversarySpec::constant_value_spec(0.1, 100.0);

  const RunResult run = run_single_spec(g, params, sim, adv, 77);
  CorruptedStream stream(kGauss, adv, agent_stream_seed(77, 0, 0),
                         agent_stream_seed(77, 0, 1));
  double mean = 0.0;
  for (std::int64_t t = 1; t <= sim.horizon; ++t) {
    // The adversary in the simulator saw thresholds; the constant strategy
    // ignores them, so the emitted stream is identical.
    const StreamRecord rec = stream.next(nullptr);
    mean = recursive_mean_update(mean, rec.emitted_value, t);
    CHECK(run.agents[0].naive_mean[static_cast<std::size_t>(t - 1)] == mean);
  }
  // Twenty planted values of 100 drag the naive mean far from zero while the
  // trimmed estimate stays put.
  const double naive_err = std::abs(run.agents[0].naive_mean.back());
  const double robust_err = std::abs(run.agents[0].estimate.back());
  CHECK(naive_err > 5.0);
  CHECK(robust_err < 1.0);
}

TEST_CASE("flooding delays availability on a path") {
  const RobustnessParams params(0.02, 0.3);
  const std::int64_t t0 = 20;
  const std::int64_t T = 80;
  const Graph g = Graph::path(3);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::fixed;
  sim.t0 = t0;
  sim.horizon = T;
  sim.dissemination = ThresholdDissemination::flooding;
  sim.threshold_agent = 0;
  sim.consensus_rounds = 1;

  const RunResult run =
      run_single_spec(g, params, sim, AdversarySpec::none_spec(), 5);
  // Agent i (hop distance i from agent 0) produces its first estimate at
  // t = t0 + i + 1.
  for (int i = 0; i < 3; ++i) {
    const auto& agent = run.agents[static_cast<std::size_t>(i)];
    for (std::int64_t t = 1; t <= t0 + i; ++t) {
      CHECK(std::isnan(agent.estimate[static_cast<std::size_t>(t - 1)]));
    }
    for (std::int64_t t = t0 + i + 1; t <= T; ++t) {
      CHECK_FALSE(std::isnan(agent.estimate[static_cast<std::size_t>(t - 1)]));
    }
  }
  // Group values appear only when every agent is live.
  CHECK(std::isnan(run.group_uniform[static_cast<std::size_t>(t0 + 1)]));
  CHECK_FALSE(std::isnan(run.group_uniform[static_cast<std::size_t>(t0 + 2)]));

  // With instant dissemination everyone starts together at t0 + 1.
  SimulationConfig instant = sim;
  instant.dissemination = ThresholdDissemination::instant;
  const RunResult run2 =
      run_single_spec(g, params, instant, AdversarySpec::none_spec(), 5);
  for (const auto& agent : run2.agents) {
    CHECK(std::isnan(agent.estimate[static_cast<std::size_t>(t0 - 1)]));
    CHECK_FALSE(std::isnan(agent.estimate[static_cast<std::size_t>(t0)]));
  }
}

TEST_CASE("flooding keeps adaptive thresholds lagged by hop distance") {
  const RobustnessParams params(0.02, 0.3);
  const std::int64_t T = 50;
  const Graph g = Graph::path(3);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = T;
  sim.dissemination = ThresholdDissemination::flooding;

  // All agents still produce estimates from t = 1 (own-data fallback).
  const RunResult run =
      run_single_spec(g, params, sim, AdversarySpec::none_spec(), 11);
  for (const auto& agent : run.agents) {
    for (std::int64_t t = 1; t <= T; ++t) {
      CHECK_FALSE(std::isnan(agent.estimate[static_cast<std::size_t>(t - 1)]));
    }
  }
}

TEST_CASE("group weighted mean uses the stationary weights") {
  const RobustnessParams params(0.02, 0.3);
  const Graph g = Graph::path(3);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = 40;

  const RunResult run =
      run_single_spec(g, params, sim, AdversarySpec::none_spec(), 13);
  for (std::int64_t t = 1; t <= sim.horizon; ++t) {
    const std::size_t ti = static_cast<std::size_t>(t - 1);
    const double expected = (2.0 / 7.0) * run.agents[0].rounds[ti][0] +
                            (3.0 / 7.0) * run.agents[1].rounds[ti][0] +
                            (2.0 / 7.0) * run.agents[2].rounds[ti][0];
    CHECK(run.group_weighted[ti] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("diagnostics record covers every step and flags early times") {
  const RobustnessParams params(0.02, 0.3);
  const std::int64_t T = 150;
  const Graph g = Graph::complete(1);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = T;
  sim.diagnostics = true;

  const RunResult run =
      run_single_spec(g, params, sim, AdversarySpec::none_spec(), 2);
  REQUIRE(run.diagnostics.bad_event.size() == static_cast<std::size_t>(T));
  // The schedule stays at or above 1/2 through t = 91 at these parameters,
  // so every such step is flagged by construction.
  for (std::int64_t t = 1; t <= 91; ++t) {
    CHECK(run.diagnostics.bad_event[static_cast<std::size_t>(t - 1)] == 1);
  }
  CHECK(run.diagnostics.first_clean_time() >= 92);
}

TEST_CASE("runs are deterministic in the trial seed") {
  const RobustnessParams params(0.02, 0.3);
  const Graph g = Graph::cycle(4);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = 100;
  sim.consensus_rounds = 2;
  const AdversarySpec adv = AdversarySpec::max_bias_spec(0.05, -1);

  const RunResult a = run_single_spec(g, params, sim, adv, 321);
  const RunResult b = run_single_spec(g, params, sim, adv, 321);
  for (int i = 0; i < 4; ++i) {
    for (std::int64_t t = 0; t < sim.horizon; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      const auto& ai = a.agents[static_cast<std::size_t>(i)];
      const auto& bi = b.agents[static_cast<std::size_t>(i)];
      CHECK(ai.estimate[ti] == bi.estimate[ti]);
      CHECK(ai.naive_mean[ti] == bi.naive_mean[ti]);
      CHECK(ai.corrupted[ti] == bi.corrupted[ti]);
    }
  }
  // A different seed produces a different trajectory.
  const RunResult c = run_single_spec(g, params, sim, adv, 322);
  CHECK(c.agents[0].estimate.back() != a.agents[0].estimate.back());
}

TEST_CASE("per-agent adversary specs are honored") {
  const RobustnessParams params(0.02, 0.3);
  const Graph g = Graph::complete(3);
  const PerronMatrix P(g);
  SimulationConfig sim;
  sim.algorithm = LocalAlgorithm::adaptive;
  sim.horizon = 100;

  std::vector<AdversarySpec> specs{
      AdversarySpec::none_spec(),
      AdversarySpec::constant_value_spec(0.2, 9.0),
      AdversarySpec::constant_value_spec(0.5, -9.0),
  };
  const RunResult run =
      distributed_run(g, P, params, sim, specs, kGauss, 17);
  CHECK(run.agents[0].corrupted_total == 0);
  CHECK(run.agents[1].corrupted_total == 20);
  CHECK(run.agents[2].corrupted_total == 50);
}

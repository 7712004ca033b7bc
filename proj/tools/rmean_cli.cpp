#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmean/consensus.hpp"
#include "rmean/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitVerifyFailure = 2;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> trials;
  int threads = 0;  // 0 = hardware concurrency
};

rmean::ExperimentConfig load_config(const std::string& path,
                                    const Overrides& overrides) {
  rmean::ExperimentConfig config = rmean::ExperimentConfig::load(path);
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.out) config.out_dir = *overrides.out;
  if (overrides.trials) {
    if (*overrides.trials < 1) {
      throw std::invalid_argument("--trials must be >= 1");
    }
    config.trials = *overrides.trials;
  }
  return config;
}

void print_report(const rmean::BoundReport& report) {
  for (const auto& check : report.checks) {
    std::printf("%-12s coverage %6lld/%-6lld = %.4f  target %.4f  [%s]  %s\n",
                check.name.c_str(), static_cast<long long>(check.successes),
                static_cast<long long>(check.n), check.coverage, check.target,
                check.pass ? "pass" : "FAIL", check.note.c_str());
  }
  if (report.checks.empty()) {
    std::printf("no bound checks apply to this configuration\n");
  }
}

int cmd_run(const std::string& config_path, const Overrides& overrides) {
  const rmean::ExperimentConfig config = load_config(config_path, overrides);
  const rmean::BoundReport report =
      rmean::run_experiment(config, overrides.threads);
  std::printf("scenario '%s': %d trials written to %s\n",
              config.scenario.c_str(), config.trials, config.out_dir.c_str());
  print_report(report);
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const Overrides& overrides,
              const std::vector<int>& k_values,
              const std::vector<double>& eta_values,
              const std::vector<std::int64_t>& t0_values) {
  const rmean::ExperimentConfig base = load_config(config_path, overrides);
  auto ks = k_values.empty() ? std::vector<int>{base.consensus_rounds} : k_values;
  auto etas =
      eta_values.empty() ? std::vector<double>{base.params.eta} : eta_values;
  auto t0s = t0_values.empty() ? std::vector<std::int64_t>{base.t0} : t0_values;
  if (base.algorithm == rmean::LocalAlgorithm::adaptive && !t0_values.empty()) {
    throw std::invalid_argument("--t0 only applies to the fixed algorithm");
  }

  nlohmann::json index = nlohmann::json::array();
  int point = 0;
  for (int k : ks) {
    for (double eta : etas) {
      for (std::int64_t t0 : t0s) {
        rmean::ExperimentConfig config = base;
        config.consensus_rounds = k;
        config.params = rmean::RobustnessParams(eta, base.params.delta);
        if (config.algorithm == rmean::LocalAlgorithm::fixed) config.t0 = t0;
        char suffix[64];
        std::snprintf(suffix, sizeof(suffix), "point_%03d", point);
        config.scenario = base.scenario + "/" + suffix;
        config.out_dir = base.out_dir + "/" + suffix;
        const rmean::BoundReport report =
            rmean::run_experiment(config, overrides.threads);
        std::printf("[%s] K=%d eta=%g t0=%lld\n", suffix, k, eta,
                    static_cast<long long>(t0));
        print_report(report);
        index.push_back({{"point", point},
                         {"K", k},
                         {"eta", eta},
                         {"t0", t0},
                         {"out", config.out_dir},
                         {"all_pass", report.all_pass()}});
        ++point;
      }
    }
  }
  std::filesystem::create_directories(base.out_dir);
  std::ofstream out(std::filesystem::path(base.out_dir) / "sweep_index.json",
                    std::ios::binary);
  if (!out) throw std::runtime_error("sweep: cannot write sweep_index.json");
  out << index.dump(2) << '\n';
  std::printf("sweep index written to %s/sweep_index.json\n",
              base.out_dir.c_str());
  return kExitOk;
}

int cmd_verify(const std::string& config_path, const Overrides& overrides) {
  const rmean::ExperimentConfig config = load_config(config_path, overrides);
  const std::filesystem::path summary_path =
      std::filesystem::path(config.out_dir) / "summary.json";
  std::ifstream in(summary_path);
  if (!in) {
    throw std::invalid_argument("verify: cannot open " + summary_path.string() +
                                " (run the experiment first)");
  }
  nlohmann::json summary;
  in >> summary;
  bool consistent = false;
  const rmean::BoundReport report =
      rmean::reverify_summary(summary, &consistent);
  print_report(report);
  if (!consistent) {
    std::printf("stored bound report does not match the recomputed one\n");
    return kExitVerifyFailure;
  }
  if (!report.all_pass()) return kExitVerifyFailure;
  std::printf("all stored bound checks verified\n");
  return kExitOk;
}

int cmd_graph_info(const std::string& graph_spec) {
  rmean::ExperimentConfig config;
  config.graph = graph_spec;
  const rmean::Graph graph = config.build_graph();
  const rmean::PerronMatrix matrix(graph);
  std::printf("vertices: %d\n", graph.size());
  std::printf("diameter: %d\n", graph.diameter());
  std::printf("lambda: %.17g\n", matrix.lambda());
  std::printf("spectral gap: %.17g\n", rmean::spectral_gap(matrix));
  std::printf("eigenvalues:");
  for (double ev : matrix.eigenvalues()) std::printf(" %.12g", ev);
  std::printf("\n");
  std::printf("stationary weights:");
  for (double w : matrix.stationary_weights()) std::printf(" %.12g", w);
  std::printf("\n");
  for (int i = 0; i < graph.size(); ++i) {
    std::printf("P[%d]:", i);
    for (int j = 0; j < graph.size(); ++j) {
      std::printf(" %.12g", matrix.entry(i, j));
    }
    std::printf("\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robust mean estimation from corrupted streams"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  Overrides overrides;
  std::uint64_t seed_value = 0;
  bool seed_set = false;
  std::string out_value;
  bool out_set = false;
  int trials_value = 0;
  bool trials_set = false;

  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t v) { seed_value = v; seed_set = true; },
         "override the master seed")
      ->expected(1);
  app.add_option_function<std::string>(
         "--out", [&](const std::string& v) { out_value = v; out_set = true; },
         "override the output directory")
      ->expected(1);
  app.add_option_function<int>(
         "--trials", [&](int v) { trials_value = v; trials_set = true; },
         "override the trial count")
      ->expected(1);
  app.add_option("--threads", overrides.threads,
                 "worker threads (0 = hardware concurrency)");

  std::string run_config;
  auto* run = app.add_subcommand("run", "run an experiment from a config");
  run->add_option("config", run_config, "config JSON path")->required();

  std::string sweep_config;
  std::vector<int> sweep_k;
  std::vector<double> sweep_eta;
  std::vector<std::int64_t> sweep_t0;
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
  sweep->add_option("config", sweep_config, "config JSON path")->required();
  sweep->add_option("--K", sweep_k, "consensus round counts")->delimiter(',');
  sweep->add_option("--eta", sweep_eta, "contamination rates")->delimiter(',');
  sweep->add_option("--t0", sweep_t0, "warm-up lengths (fixed algorithm)")
      ->delimiter(',');

  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "recheck a stored summary");
  verify->add_option("config", verify_config, "config JSON path")->required();

  std::string graph_spec;
  auto* graph_info = app.add_subcommand("graph-info", "describe a graph");
  graph_info->add_option("graph", graph_spec,
                         "graph spec (e.g. complete:5 or file:g.txt)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return kExitConfigError;
  }

  if (seed_set) overrides.seed = seed_value;
  if (out_set) overrides.out = out_value;
  if (trials_set) overrides.trials = trials_value;

  try {
    if (run->parsed()) return cmd_run(run_config, overrides);
    if (sweep->parsed()) {
      return cmd_sweep(sweep_config, overrides, sweep_k, sweep_eta, sweep_t0);
    }
    if (verify->parsed()) return cmd_verify(verify_config, overrides);
    if (graph_info->parsed()) return cmd_graph_info(graph_spec);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
  return kExitConfigError;
}

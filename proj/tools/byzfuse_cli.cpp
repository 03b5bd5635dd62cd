// byzfuse: payoff matrices, equilibria and scheme comparisons for decision
// fusion with Byzantine nodes.
//
//   byzfuse payoff       --config configs/independent_alpha03_m4.cfg --out results/
//   byzfuse equilibrium  --config configs/fixed8_m4.cfg --trials 500000
//   byzfuse compare      --config configs/independent_alpha03_m4.cfg
//   byzfuse oracle-check
//
// Exit status: 0 success, 1 configuration error, 2 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "byzfuse/experiment.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::string> out;
  std::optional<std::string> metric;
  std::optional<int> threads;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Key = value configuration file");
  cmd->add_option("--seed", o.seed, "Global seed (u64)");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per payoff row");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--metric", o.metric, "per-component or per-sequence");
  cmd->add_option("--threads", o.threads, "Worker threads for the simulation");
}

byzfuse::ExperimentConfig resolve(const Overrides& o) {
  byzfuse::ExperimentConfig config =
      o.config_path.empty() ? byzfuse::ExperimentConfig{} : byzfuse::load_config(o.config_path);
  if (o.seed) config.seed = *o.seed;
  if (o.trials) config.trials = *o.trials;
  if (o.out) config.output_dir = *o.out;
  if (o.threads) config.threads = *o.threads;
  if (o.metric) {
    try {
      config.metric = byzfuse::parse_metric(*o.metric);
    } catch (const std::invalid_argument& e) {
      throw byzfuse::ConfigError(e.what());
    }
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimum decision fusion with Byzantine nodes"};
  app.require_subcommand(1);

  Overrides o;
  auto* payoff = app.add_subcommand("payoff", "Estimate the payoff matrix");
  auto* equilibrium = app.add_subcommand("equilibrium", "Dominance, saddle points and mixed equilibrium");
  auto* compare = app.add_subcommand("compare", "Majority vs optimum fusion at equilibrium");
  auto* oracle_check = app.add_subcommand("oracle-check", "Check fusion against the exhaustive MAP oracle");
  for (auto* cmd : {payoff, equilibrium, compare, oracle_check}) add_common_flags(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const auto config = resolve(o);
    if (payoff->parsed()) {
      const auto pm = byzfuse::run_payoff(config);
      std::cout << byzfuse::to_markdown(pm);
    } else if (equilibrium->parsed()) {
      const auto report = byzfuse::run_equilibrium(config);
      std::cout << "saddle points: " << report.saddles.size()
                << ", P_e* = " << byzfuse::format_number(report.equilibrium.value) << '\n';
    } else if (compare->parsed()) {
      for (const auto& c : byzfuse::run_compare(config).columns) {
        std::cout << c.scheme << ' ' << byzfuse::format_number(c.pe) << '\n';
      }
    } else {
      const auto result = byzfuse::run_oracle_check(config);
      std::cout << result.matrices << " report matrices, " << result.mismatches << " mismatches\n";
    }
    std::cout << "wrote " << config.output_dir.string() << '\n';
  } catch (const byzfuse::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

#pragma once

// Config-driven experiment runner behind the byzfuse command line tool.
//
// Config files are flat "key = value" lines; '#' starts a comment. Keys and
// defaults:
//
//   n            = 20
//   m            = 4
//   eps          = 0.1
//   true_model   = independent:0.3     (see parse_model)
//   fc_model     = <true_model>
//   grid_b       = 0.5,0.6,0.7,0.8,0.9,1.0
//   grid_fc      = 0.5,0.6,0.7,0.8,0.9,1.0
//   trials       = 50000
//   seed         = 1
//   error_metric = per-component       (or per-sequence)
//   output_dir   = out
//   threads      = 1
//   payoff_input = <none>              (CSV from a previous payoff run)
//
// Unknown or repeated keys are rejected.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "byzfuse/game.hpp"
#include "byzfuse/model.hpp"
#include "byzfuse/oracle.hpp"

namespace byzfuse {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  int n = 20;
  int m = 4;
  Probability eps = 0.1;
  ByzantineModel true_model = IndependentAlpha{0.3};
  std::optional<ByzantineModel> fc_model;
  StrategyGrid grid_b;
  StrategyGrid grid_fc;
  std::int64_t trials = 50000;
  std::uint64_t seed = 1;
  ErrorMetric metric = ErrorMetric::kPerComponent;
  std::filesystem::path output_dir = "out";
  int threads = 1;
  std::optional<std::filesystem::path> payoff_input;

  const ByzantineModel& fc() const { return fc_model ? *fc_model : true_model; }
  Scenario scenario() const;

  // Throws ConfigError.
  void validate() const;

  // Canonical key = value listing of everything that affects results
  // (output_dir and threads are left out).
  std::string canonical() const;
  // FNV-1a of canonical(), 16 hex digits.
  std::string hash() const;
};

// Throws ConfigError on syntax errors, unknown keys or invalid values.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
// Throws std::runtime_error on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Writes payoff.csv, payoff.md and meta.txt. Without payoff_input the matrix
// is estimated by simulation.
PayoffMatrix run_payoff(const ExperimentConfig& config);

struct EquilibriumReport {
  PayoffMatrix matrix;
  std::optional<std::size_t> strict_dominant;  // exact comparisons
  std::optional<std::size_t> weak_dominant;
  DominanceReport dominance;                   // with noise margins
  std::vector<PureProfile> saddles;            // exact comparisons
  std::vector<PureProfile> saddles_within_noise;
  Equilibrium equilibrium;
};

// Writes equilibrium.md, plus the payoff files when the matrix is estimated.
EquilibriumReport run_equilibrium(const ExperimentConfig& config);

// One column of the comparison table. New fusion schemes are added by
// appending further columns in run_compare.
struct CompareColumn {
  std::string scheme;
  double pe = 0.0;
  std::string note;
};

struct CompareReport {
  std::vector<CompareColumn> columns;
};

// Writes compare.md with Maj at pmal_b = 1 and OPT at the solved equilibrium.
CompareReport run_compare(const ExperimentConfig& config);

// Writes oracle_check.md. Throws std::runtime_error listing the mismatches
// if fusion disagrees with the exhaustive MAP oracle.
oracle::FusionCheckResult run_oracle_check(const ExperimentConfig& config);

}  // namespace byzfuse

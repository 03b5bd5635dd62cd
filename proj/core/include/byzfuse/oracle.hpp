#pragma once

// Exhaustive reference computations for desk-sized networks. Everything here
// works in the linear probability domain and enumerates placements and report
// matrices literally; it shares no code with the log-domain fusion path.

#include <cstdint>
#include <string>
#include <vector>

#include "byzfuse/fusion.hpp"
#include "byzfuse/game.hpp"
#include "byzfuse/model.hpp"

namespace byzfuse::oracle {

struct ExactScenario {
  int n = 4;
  int m = 2;
  Probability eps = 0.1;
  Probability pmal_b = 1.0;
  Probability pmal_fc = 1.0;
  ByzantineModel true_model = IndependentAlpha{0.3};
  ByzantineModel fc_model = IndependentAlpha{0.3};

  // Throws std::invalid_argument unless n <= 6, m <= 3 and n*m <= 18.
  void validate() const;
};

// P(a^n) under `model`.
double placement_probability(const NodePlacement& a, const ByzantineModel& model);

// prod_i prod_j P(r_ij | a_i, s_j) with crossover eps for honest nodes and
// delta for Byzantine ones.
double report_probability(const ReportMatrix& r, const NodePlacement& a, const StateSequence& s,
                          Probability eps, Probability delta);

// sum over placements of report_probability * P(a^n). Enumerates all 2^n
// placements for n <= 16; IndependentAlpha with n <= 20 uses the per-node
// product. Throws std::length_error beyond that.
double exact_likelihood(const ReportMatrix& r, const StateSequence& s,
                        const ByzantineModel& model, Probability eps, Probability delta);

// MAP sequence from exact_likelihood with the same tie rule as fuse():
// first hypothesis within a relative kTieTolerance of the best likelihood.
StateSequence exact_map(const ReportMatrix& r, const FusionAssumption& assumption);

// Row-major bit counting: bit n*m-1 of `code` is r_11.
ReportMatrix report_from_code(std::uint64_t code, int n, int m);
NodePlacement placement_from_code(std::uint64_t code, int n);

// P_e = sum_s 2^-m sum_a P(a) sum_r P(r | a, s) err(fuse(r), s), with the
// FC fusing under (fc_model, eps, pmal_fc) and the network flipping with
// pmal_b under true_model.
double exact_error_probability(const ExactScenario& sc, ErrorMetric metric);

struct FusionCheckResult {
  std::int64_t scenarios = 0;
  std::int64_t matrices = 0;
  std::int64_t mismatches = 0;
  std::vector<std::string> failures;  // first few mismatches, human readable
};

// Compares fuse() with exact_map() on every report matrix of every scenario
// in the grid n in {2,3,4}, m in {1,2}, the four placement models
// (max-entropy, independent:0.3, bounded-half, fixed:1), eps in {0.1,0.3} and
// pmal_fc in {0.5,0.7,1.0}.
FusionCheckResult check_fusion_grid();

}  // namespace byzfuse::oracle

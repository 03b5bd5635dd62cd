#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "byzfuse/game.hpp"
#include "byzfuse/oracle.hpp"

namespace byzfuse::oracle {
namespace {

TEST(ReportProbability, SingleHonestNode) {
  const auto s = StateSequence::FromCode(1, 1);
  const ReportMatrix r(1, 1, {1});
  EXPECT_NEAR(exact_likelihood(r, s, FixedCount{0}, 0.1, 0.9), 0.9, 1e-15);
}

TEST(ReportProbability, SingleByzantineNodeDisagreeing) {
  const auto s = StateSequence::FromCode(1, 1);
  const ReportMatrix r(1, 1, {0});
  const double delta = crossover_delta({0.1, 0.8});
  EXPECT_NEAR(exact_likelihood(r, s, FixedCount{1}, 0.1, delta), delta, 1e-15);
}

TEST(PlacementProbability, SumsToOne) {
  const std::vector<ByzantineModel> models = {UnconstrainedMaxEntropy{}, IndependentAlpha{0.3},
                                              BoundedBelowHalf{}, BoundedBelowHalf{true},
                                              FixedCount{2}};
  for (const auto& model : models) {
    double total = 0.0;
    for (std::uint64_t c = 0; c < 32; ++c) total += placement_probability(placement_from_code(c, 5), model);
    EXPECT_NEAR(total, 1.0, 1e-14) << to_string(model);
  }
}

TEST(ExactLikelihood, MatchesFactorizedScore) {
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto r = report_from_code(gen() & 0xFF, 4, 2);
    const auto s = StateSequence::FromCode(gen() & 3, 2);
    const double exact = exact_likelihood(r, s, IndependentAlpha{0.3}, 0.1, 0.9);
    const double fast = std::exp(log_score_independent(r, s, 0.3, 0.1, 0.9));
    ASSERT_LE(std::abs(fast - exact), 1e-12 * exact);
  }
}

TEST(ExactLikelihood, LargeIndependentNetworksUseProductForm) {
  ReportMatrix r(18, 1);
  const auto s = StateSequence::FromCode(0, 1);
  const double p = exact_likelihood(r, s, IndependentAlpha{0.2}, 0.1, 0.9);
  EXPECT_NEAR(p, std::pow(0.8 * 0.9 + 0.2 * 0.1, 18), 1e-15);
  EXPECT_THROW(exact_likelihood(r, s, FixedCount{2}, 0.1, 0.9), std::length_error);
}

TEST(Codes, RowMajorWithFirstEntryMostSignificant) {
  const auto r = report_from_code(0b100000, 3, 2);
  EXPECT_EQ(r(0, 0), 1);
  EXPECT_EQ(r(2, 1), 0);
  EXPECT_EQ(report_from_code(0b000001, 3, 2)(2, 1), 1);
  EXPECT_EQ(placement_from_code(0b100, 3)[0], 1);
}

TEST(ExactError, NoiselessHonestNetwork) {
  ExactScenario sc;
  sc.n = 4;
  sc.m = 2;
  sc.eps = 0.0;
  sc.true_model = FixedCount{0};
  sc.fc_model = FixedCount{0};
  EXPECT_EQ(exact_error_probability(sc, ErrorMetric::kPerComponent), 0.0);
  EXPECT_EQ(exact_error_probability(sc, ErrorMetric::kPerSequence), 0.0);
}

TEST(ExactError, BlindedNetworkForcesGuessing) {
  for (double pmal_fc : {0.5, 0.7, 1.0}) {
    ExactScenario sc;
    sc.n = 4;
    sc.m = 1;
    sc.eps = 0.1;
    sc.pmal_b = 1.0;
    sc.pmal_fc = pmal_fc;
    sc.true_model = UnconstrainedMaxEntropy{};
    sc.fc_model = UnconstrainedMaxEntropy{};
    EXPECT_NEAR(exact_error_probability(sc, ErrorMetric::kPerComponent), 0.5, 1e-15) << pmal_fc;
  }
}

TEST(ExactError, AgreesWithSimulation) {
  ExactScenario sc;
  sc.n = 4;
  sc.m = 2;
  sc.eps = 0.1;
  sc.pmal_b = 1.0;
  sc.pmal_fc = 1.0;
  sc.true_model = FixedCount{1};
  sc.fc_model = FixedCount{1};
  const double exact = exact_error_probability(sc, ErrorMetric::kPerComponent);

  Scenario sim;
  sim.n = 4;
  sim.m = 2;
  sim.eps = 0.1;
  sim.true_model = FixedCount{1};
  sim.fc_model = FixedCount{1};
  const auto est = estimate_payoff_matrix(sim, StrategyGrid({1.0}), StrategyGrid({1.0}), 1000000, 12);
  EXPECT_NEAR(est.per_component.pe(0, 0), exact, 3.0 * est.per_component.std_err(0, 0));
}

TEST(ExactError, PerSequenceDominatesPerComponent) {
  ExactScenario sc;
  sc.n = 5;
  sc.m = 3;
  sc.pmal_b = 0.8;
  sc.pmal_fc = 0.9;
  sc.true_model = IndependentAlpha{0.3};
  sc.fc_model = IndependentAlpha{0.3};
  const double component = exact_error_probability(sc, ErrorMetric::kPerComponent);
  const double sequence = exact_error_probability(sc, ErrorMetric::kPerSequence);
  EXPECT_GT(component, 0.0);
  EXPECT_GE(sequence, component);
  EXPECT_LE(sequence, 3.0 * component + 1e-15);
}

TEST(ExactScenario, RejectsOversizedProblems) {
  ExactScenario sc;
  sc.n = 7;
  EXPECT_THROW(sc.validate(), std::invalid_argument);
  sc.n = 6;
  sc.m = 4;
  EXPECT_THROW(sc.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace byzfuse::oracle

#include <array>
#include <cmath>
#include <set>
#include <stdexcept>

#include <gtest/gtest.h>

#include "byzfuse/model.hpp"

namespace byzfuse {
namespace {

TEST(CrossoverDelta, FullFlipGivesComplementOfEps) {
  EXPECT_NEAR(crossover_delta({0.1, 1.0}), 0.9, 1e-15);
}

TEST(CrossoverDelta, HalfFlipBlindsForAnyEps) {
  for (double eps : {0.0, 0.05, 0.1, 0.3, 0.5, 0.9}) {
    EXPECT_NEAR(crossover_delta({eps, 0.5}), 0.5, 1e-15) << eps;
  }
}

TEST(CrossoverDelta, IntermediateFlip) {
  EXPECT_NEAR(crossover_delta({0.1, 0.8}), 0.74, 1e-15);
}

TEST(CrossoverDelta, RejectsOutOfRange) {
  EXPECT_THROW(crossover_delta({1.1, 0.5}), std::invalid_argument);
  EXPECT_THROW(crossover_delta({0.1, -0.2}), std::invalid_argument);
}

TEST(StateSequence, CodeUsesFirstComponentAsMostSignificantBit) {
  const auto s = StateSequence::FromCode(0b1000, 4);
  EXPECT_EQ(s[0], 1);
  EXPECT_EQ(s[3], 0);
  for (std::uint64_t c = 0; c < 16; ++c) EXPECT_EQ(StateSequence::FromCode(c, 4).code(), c);
  EXPECT_EQ(StateSequence::FromCode(0b0110, 4).complement().code(), 0b1001u);
}

TEST(StateSequence, RejectsNonBinaryEntries) {
  EXPECT_THROW(StateSequence({0, 2}), std::invalid_argument);
}

TEST(SampleStates, FairBits) {
  RandomStream rng(11);
  std::array<int, 4> ones{};
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    const auto s = sample_states(rng, 4);
    for (int j = 0; j < 4; ++j) ones[static_cast<std::size_t>(j)] += s[j];
  }
  for (int c : ones) EXPECT_NEAR(static_cast<double>(c) / draws, 0.5, 0.01);
}

TEST(SampleStates, SameSeedSameSequence) {
  RandomStream a(99);
  RandomStream b(99);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(sample_states(a, 7), sample_states(b, 7));
}

TEST(SampleStates, UniformOverSixteenSequences) {
  RandomStream rng(5);
  std::array<int, 16> freq{};
  const int draws = 1000000;
  for (int t = 0; t < draws; ++t) ++freq[sample_states(rng, 4).code()];
  for (int f : freq) EXPECT_NEAR(static_cast<double>(f) / draws, 1.0 / 16, 0.01);
}

TEST(SamplePlacement, FixedCountIsExact) {
  RandomStream rng(3);
  for (int t = 0; t < 10000; ++t) {
    EXPECT_EQ(sample_placement(rng, FixedCount{6}, 20).byzantine_count(), 6);
  }
}

TEST(SamplePlacement, FixedCountCoversEveryNode) {
  RandomStream rng(4);
  std::array<int, 20> hits{};
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    const auto a = sample_placement(rng, FixedCount{6}, 20);
    for (int i = 0; i < 20; ++i) hits[static_cast<std::size_t>(i)] += a[i];
  }
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / draws, 0.3, 0.01);
}

TEST(SamplePlacement, BoundedBelowHalfMeanCount) {
  RandomStream rng(7);
  const int draws = 1000000;
  double total = 0.0;
  int largest = 0;
  for (int t = 0; t < draws; ++t) {
    const int c = sample_placement(rng, BoundedBelowHalf{}, 20).byzantine_count();
    total += c;
    largest = std::max(largest, c);
  }
  EXPECT_NEAR(total / draws, 7.86, 0.02);
  EXPECT_EQ(largest, 9);
}

TEST(SamplePlacement, BoundedInclusiveAllowsHalf) {
  RandomStream rng(8);
  int largest = 0;
  for (int t = 0; t < 100000; ++t) {
    largest = std::max(largest, sample_placement(rng, BoundedBelowHalf{true}, 20).byzantine_count());
  }
  EXPECT_EQ(largest, 10);
  EXPECT_EQ(max_byzantine_count(BoundedBelowHalf{}, 20), 9);
  EXPECT_EQ(max_byzantine_count(BoundedBelowHalf{}, 21), 10);
  EXPECT_EQ(max_byzantine_count(BoundedBelowHalf{true}, 21), 10);
}

TEST(SamplePlacement, IndependentAlphaMeanCount) {
  RandomStream rng(9);
  const int draws = 1000000;
  double total = 0.0;
  for (int t = 0; t < draws; ++t) {
    total += sample_placement(rng, IndependentAlpha{0.3}, 20).byzantine_count();
  }
  EXPECT_NEAR(total / draws, 6.0, 0.05);
}

TEST(SampleReports, NoiselessHonestNetworkCopiesState) {
  RandomStream rng(1);
  const auto s = StateSequence::FromCode(0b1011, 4);
  const NodePlacement a(std::vector<std::uint8_t>(5, 0));
  const auto r = sample_reports(rng, s, a, 0.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(r(i, j), s[j]);
  }
}

TEST(SampleReports, DeterministicFlipGivesComplement) {
  RandomStream rng(1);
  const auto s = StateSequence::FromCode(0b1011, 4);
  const NodePlacement a(std::vector<std::uint8_t>(5, 1));
  const auto r = sample_reports(rng, s, a, 0.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(r(i, j), 1 - s[j]);
  }
}

TEST(SampleReports, ByzantineErrorRateMatchesCrossover) {
  RandomStream rng(21);
  const double eps = 0.1;
  const double pmal = 0.7;
  const NodePlacement a(std::vector<std::uint8_t>{1});
  std::int64_t wrong = 0;
  const int draws = 100000;
  const int m = 10;
  for (int t = 0; t < draws; ++t) {
    const auto s = sample_states(rng, m);
    const auto r = sample_reports(rng, s, a, eps, pmal);
    for (int j = 0; j < m; ++j) wrong += r(0, j) != s[j];
  }
  EXPECT_NEAR(static_cast<double>(wrong) / (draws * m), crossover_delta({eps, pmal}), 0.002);
}

TEST(ByzantineModel, TextRoundTrip) {
  for (const char* text : {"max-entropy", "independent:0.3", "bounded-half",
                           "bounded-half:inclusive", "fixed:6"}) {
    EXPECT_EQ(to_string(parse_model(text)), text);
  }
  EXPECT_EQ(parse_model("fixed:8"), ByzantineModel{FixedCount{8}});
}

TEST(ByzantineModel, RejectsMalformedText) {
  EXPECT_THROW(parse_model("fixed"), std::invalid_argument);
  EXPECT_THROW(parse_model("fixed:x"), std::invalid_argument);
  EXPECT_THROW(parse_model("independent:"), std::invalid_argument);
  EXPECT_THROW(parse_model("gaussian"), std::invalid_argument);
}

TEST(ByzantineModel, ValidationAgainstNetworkSize) {
  EXPECT_THROW(validate_model(FixedCount{21}, 20), std::invalid_argument);
  EXPECT_THROW(validate_model(FixedCount{-1}, 20), std::invalid_argument);
  EXPECT_THROW(validate_model(IndependentAlpha{1.5}, 20), std::invalid_argument);
  EXPECT_NO_THROW(validate_model(FixedCount{20}, 20));
}

TEST(ReportMatrix, PackedRowsRoundTrip) {
  ReportMatrix r(3, 4, {1, 0, 1, 1,
                        0, 0, 0, 1,
                        1, 1, 1, 1});
  const auto rows = r.packed_rows();
  EXPECT_EQ(rows, (std::vector<std::uint32_t>{0b1011, 0b0001, 0b1111}));
  EXPECT_EQ(ReportMatrix::FromPackedRows(rows, 4), r);
  EXPECT_EQ(r.complement().packed_rows(), (std::vector<std::uint32_t>{0b0100, 0b1110, 0b0000}));
}

TEST(RandomStream, BelowStaysInRangeAndCoversIt) {
  RandomStream rng(13);
  std::set<std::uint64_t> seen;
  for (int t = 0; t < 10000; ++t) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(RandomStream, BernoulliEndpointsAreExact) {
  RandomStream rng(17);
  for (int t = 0; t < 10000; ++t) {
    EXPECT_FALSE(rng.bernoulli(0.0));
    EXPECT_TRUE(rng.bernoulli(1.0));
  }
}

TEST(DeriveSeed, DistinctIndicesGiveDistinctSeeds) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(42, i));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_EQ(derive_seed(42, 3), derive_seed(42, 3));
  EXPECT_NE(derive_seed(42, 3), derive_seed(43, 3));
}

}  // namespace
}  // namespace byzfuse

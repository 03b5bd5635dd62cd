#pragma once

// MAP fusion over whole state sequences. All state hypotheses are equiprobable,
// so the rule maximizes P(r | s^m) under the FC's assumed Byzantine model and
// flipping probability. Scores are log-likelihoods up to an additive constant
// that does not depend on s^m.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "byzfuse/model.hpp"

namespace byzfuse {

// The FC's view of the network: placement model, local error eps, and its
// guess pmal_fc of the Byzantine flipping probability.
struct FusionAssumption {
  ByzantineModel model = IndependentAlpha{};
  Probability eps = 0.1;
  Probability pmal_fc = 1.0;

  Probability delta_fc() const { return crossover_delta({eps, pmal_fc}); }
};

// counts[i] = number of components j with r_ij == s_j.
using MatchCounts = std::vector<int>;

// Throws std::invalid_argument on dimension mismatch.
MatchCounts match_counts(const ReportMatrix& r, const StateSequence& s);

// sum_i log[(1-alpha) h(i) + alpha b(i)] with h(i) = (1-eps)^meq eps^(m-meq)
// and b(i) = (1-delta)^meq delta^(m-meq). Zero likelihoods give -infinity.
double log_score_independent(const ReportMatrix& r, const StateSequence& s, double alpha,
                             Probability eps, Probability delta_fc);

// log f_{n,n_b} for FixedCount, log sum_{k=0}^{K} f_{n,k} for BoundedBelowHalf,
// evaluated with the subset-sum recursion. Throws std::invalid_argument for
// any other model.
double log_score_subset(const ReportMatrix& r, const StateSequence& s,
                        const ByzantineModel& model, Probability eps, Probability delta_fc);

// Dispatches on assumption.model; UnconstrainedMaxEntropy scores as
// IndependentAlpha with alpha = 0.5.
double log_score(const ReportMatrix& r, const StateSequence& s,
                 const FusionAssumption& assumption);

inline constexpr int kMaxEnumeratedComponents = 24;

// Scores closer than this (absolute, log domain) to the maximum count as tied.
inline constexpr double kTieTolerance = 1e-9;

// Index of the first score within kTieTolerance of the maximum. If every score
// is -infinity, returns 0. Throws std::invalid_argument on an empty span.
std::size_t argmax_lexicographic(std::span<const double> scores);

// Precomputed MAP rule for a fixed (assumption, n, m). Rows and hypotheses are
// packed with s_1 in the most significant bit. Safe for concurrent use.
class MapFusion {
 public:
  // Throws std::length_error if m > kMaxEnumeratedComponents and
  // std::invalid_argument on an invalid assumption.
  MapFusion(FusionAssumption assumption, int n, int m);

  int nodes() const { return n_; }
  int components() const { return m_; }
  const FusionAssumption& assumption() const { return assumption_; }

  double score(std::span<const std::uint32_t> rows, std::uint32_t hypothesis) const;
  std::uint32_t decide(std::span<const std::uint32_t> rows) const;

 private:
  enum class Kind { kIndependent, kFixed, kBounded };

  FusionAssumption assumption_;
  int n_;
  int m_;
  Kind kind_;
  int k_target_ = 0;
  // Indexed by match count 0..m.
  std::vector<double> log_h_;
  std::vector<double> log_b_;
  std::vector<double> log_mixture_;
};

// Lexicographically smallest MAP sequence. Throws std::length_error if the
// sequence is longer than kMaxEnumeratedComponents.
StateSequence fuse(const ReportMatrix& r, const FusionAssumption& assumption);

// Per-component majority: s_j = 1 iff more than n/2 reports are 1.
StateSequence fuse_majority(const ReportMatrix& r);
std::uint32_t majority_decision(std::span<const std::uint32_t> rows, int m);

}  // namespace byzfuse

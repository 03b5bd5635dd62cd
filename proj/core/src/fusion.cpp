#include "byzfuse/fusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "byzfuse/dp.hpp"

namespace byzfuse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// count * log(p) with 0 * log(0) = 0.
double xlogy(int count, double p) {
  return count == 0 ? 0.0 : count * std::log(p);
}

// log[(1-p)^meq p^(m-meq)] for meq = 0..m.
std::vector<double> channel_log_likelihoods(Probability p, int m) {
  std::vector<double> out(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) out[static_cast<std::size_t>(k)] = xlogy(k, 1.0 - p) + xlogy(m - k, p);
  return out;
}

std::vector<double> mixture_log_likelihoods(const std::vector<double>& log_h,
                                            const std::vector<double>& log_b, double alpha) {
  const double log_honest = std::log1p(-alpha);
  const double log_byz = std::log(alpha);
  std::vector<double> out(log_h.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = dp::log_add(log_honest + log_h[k], log_byz + log_b[k]);
  }
  return out;
}

void check_dims(const ReportMatrix& r, const StateSequence& s) {
  if (r.components() != s.size()) {
    throw std::invalid_argument("report matrix has " + std::to_string(r.components()) +
                                " components but state sequence has " +
                                std::to_string(s.size()));
  }
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

double subset_log_score(const dp::NodeWeights& w, const ByzantineModel& model) {
  if (const auto* fixed = std::get_if<FixedCount>(&model)) {
    return dp::subset_sum(w, fixed->n_b);
  }
  const auto& bounded = std::get<BoundedBelowHalf>(model);
  const int k_max = max_byzantine_count(bounded, w.size());
  if (k_max < 0) return kNegInf;
  double total = kNegInf;
  for (double f : dp::subset_sum_all(w, k_max)) total = dp::log_add(total, f);
  return total;
}

}  // namespace

MatchCounts match_counts(const ReportMatrix& r, const StateSequence& s) {
  check_dims(r, s);
  MatchCounts counts(static_cast<std::size_t>(r.nodes()), 0);
  for (int i = 0; i < r.nodes(); ++i) {
    for (int j = 0; j < r.components(); ++j) {
      if (r(i, j) == s[j]) ++counts[static_cast<std::size_t>(i)];
    }
  }
  return counts;
}

double log_score_independent(const ReportMatrix& r, const StateSequence& s, double alpha,
                             Probability eps, Probability delta_fc) {
  check_probability(alpha, "alpha");
  check_probability(eps, "eps");
  check_probability(delta_fc, "delta_fc");
  const int m = r.components();
  const auto mixture = mixture_log_likelihoods(channel_log_likelihoods(eps, m),
                                               channel_log_likelihoods(delta_fc, m), alpha);
  double score = 0.0;
  for (int meq : match_counts(r, s)) score += mixture[static_cast<std::size_t>(meq)];
  return score;
}

double log_score_subset(const ReportMatrix& r, const StateSequence& s,
                        const ByzantineModel& model, Probability eps, Probability delta_fc) {
  if (!std::holds_alternative<FixedCount>(model) &&
      !std::holds_alternative<BoundedBelowHalf>(model)) {
    throw std::invalid_argument("log_score_subset requires a fixed-count or bounded model");
  }
  validate_model(model, r.nodes());
  check_probability(eps, "eps");
  check_probability(delta_fc, "delta_fc");
  const int m = r.components();
  const auto log_h = channel_log_likelihoods(eps, m);
  const auto log_b = channel_log_likelihoods(delta_fc, m);

  dp::NodeWeights w;
  for (int meq : match_counts(r, s)) {
    w.log_b.push_back(log_b[static_cast<std::size_t>(meq)]);
    w.log_h.push_back(log_h[static_cast<std::size_t>(meq)]);
  }
  return subset_log_score(w, model);
}

double log_score(const ReportMatrix& r, const StateSequence& s,
                 const FusionAssumption& assumption) {
  const double delta = assumption.delta_fc();
  if (std::holds_alternative<UnconstrainedMaxEntropy>(assumption.model)) {
    return log_score_independent(r, s, 0.5, assumption.eps, delta);
  }
  if (const auto* ind = std::get_if<IndependentAlpha>(&assumption.model)) {
    return log_score_independent(r, s, ind->alpha, assumption.eps, delta);
  }
  return log_score_subset(r, s, assumption.model, assumption.eps, delta);
}

std::size_t argmax_lexicographic(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("argmax_lexicographic: no scores");
  const double best = *std::max_element(scores.begin(), scores.end());
  if (best == kNegInf) return 0;
  const double threshold = best - kTieTolerance;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (scores[c] >= threshold) return c;
  }
  return 0;
}

MapFusion::MapFusion(FusionAssumption assumption, int n, int m)
    : assumption_(std::move(assumption)), n_(n), m_(m) {
  if (m < 1) throw std::invalid_argument("MapFusion: m must be at least 1");
  if (m > kMaxEnumeratedComponents) {
    throw std::length_error("MAP fusion enumerates 2^m hypotheses; m=" + std::to_string(m) +
                            " exceeds the limit of " + std::to_string(kMaxEnumeratedComponents));
  }
  validate_model(assumption_.model, n);
  check_probability(assumption_.eps, "eps");
  check_probability(assumption_.pmal_fc, "pmal_fc");

  log_h_ = channel_log_likelihoods(assumption_.eps, m);
  log_b_ = channel_log_likelihoods(assumption_.delta_fc(), m);

  if (std::holds_alternative<UnconstrainedMaxEntropy>(assumption_.model)) {
    kind_ = Kind::kIndependent;
    log_mixture_ = mixture_log_likelihoods(log_h_, log_b_, 0.5);
  } else if (const auto* ind = std::get_if<IndependentAlpha>(&assumption_.model)) {
    kind_ = Kind::kIndependent;
    log_mixture_ = mixture_log_likelihoods(log_h_, log_b_, ind->alpha);
  } else if (const auto* fixed = std::get_if<FixedCount>(&assumption_.model)) {
    kind_ = Kind::kFixed;
    k_target_ = fixed->n_b;
  } else {
    kind_ = Kind::kBounded;
    k_target_ = max_byzantine_count(std::get<BoundedBelowHalf>(assumption_.model), n);
  }
}

double MapFusion::score(std::span<const std::uint32_t> rows, std::uint32_t hypothesis) const {
  if (static_cast<int>(rows.size()) != n_) {
    throw std::invalid_argument("MapFusion: expected " + std::to_string(n_) + " report rows");
  }
  const std::uint32_t mask = (m_ == 32) ? ~0U : ((1U << m_) - 1U);

  if (kind_ == Kind::kIndependent) {
    double total = 0.0;
    for (auto row : rows) {
      const int meq = m_ - std::popcount((row ^ hypothesis) & mask);
      total += log_mixture_[static_cast<std::size_t>(meq)];
    }
    return total;
  }

  dp::NodeWeights w;
  w.log_b.resize(rows.size());
  w.log_h.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto meq = static_cast<std::size_t>(m_ - std::popcount((rows[i] ^ hypothesis) & mask));
    w.log_b[i] = log_b_[meq];
    w.log_h[i] = log_h_[meq];
  }
  if (kind_ == Kind::kFixed) return dp::subset_sum(w, k_target_);
  if (k_target_ < 0) return kNegInf;
  double total = kNegInf;
  for (double f : dp::subset_sum_all(w, k_target_)) total = dp::log_add(total, f);
  return total;
}

std::uint32_t MapFusion::decide(std::span<const std::uint32_t> rows) const {
  std::vector<double> scores(std::size_t{1} << m_);
  for (std::size_t c = 0; c < scores.size(); ++c) {
    scores[c] = score(rows, static_cast<std::uint32_t>(c));
  }
  return static_cast<std::uint32_t>(argmax_lexicographic(scores));
}

StateSequence fuse(const ReportMatrix& r, const FusionAssumption& assumption) {
  const MapFusion rule(assumption, r.nodes(), r.components());
  const auto rows = r.packed_rows();
  return StateSequence::FromCode(rule.decide(rows), r.components());
}

std::uint32_t majority_decision(std::span<const std::uint32_t> rows, int m) {
  const auto n = static_cast<int>(rows.size());
  std::uint32_t decision = 0;
  for (int j = 0; j < m; ++j) {
    const int shift = m - 1 - j;
    int ones = 0;
    for (auto row : rows) ones += static_cast<int>((row >> shift) & 1U);
    decision = (decision << 1) | (2 * ones > n ? 1U : 0U);
  }
  return decision;
}

StateSequence fuse_majority(const ReportMatrix& r) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(r.components()));
  for (int j = 0; j < r.components(); ++j) {
    int ones = 0;
    for (int i = 0; i < r.nodes(); ++i) ones += r(i, j);
    bits[static_cast<std::size_t>(j)] = 2 * ones > r.nodes() ? 1 : 0;
  }
  return StateSequence(std::move(bits));
}

}  // namespace byzfuse

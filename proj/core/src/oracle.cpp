#include "byzfuse/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace byzfuse::oracle {

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return c;
}

// p^k with 0^0 = 1.
double power(double p, int k) { return k == 0 ? 1.0 : std::pow(p, k); }

}  // namespace

void ExactScenario::validate() const {
  if (n < 1 || n > 6) throw std::invalid_argument("ExactScenario: n must lie in [1, 6]");
  if (m < 1 || m > 3) throw std::invalid_argument("ExactScenario: m must lie in [1, 3]");
  if (n * m > 18) throw std::invalid_argument("ExactScenario: n*m must not exceed 18");
  for (double p : {eps, pmal_b, pmal_fc}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("ExactScenario: probability outside [0,1]");
  }
  validate_model(true_model, n);
  validate_model(fc_model, n);
}

double placement_probability(const NodePlacement& a, const ByzantineModel& model) {
  const int n = a.size();
  const int count = a.byzantine_count();
  if (std::holds_alternative<UnconstrainedMaxEntropy>(model)) {
    return std::pow(0.5, n);
  }
  if (const auto* ind = std::get_if<IndependentAlpha>(&model)) {
    return power(ind->alpha, count) * power(1.0 - ind->alpha, n - count);
  }
  if (const auto* bounded = std::get_if<BoundedBelowHalf>(&model)) {
    const int limit = max_byzantine_count(*bounded, n);
    if (count > limit) return 0.0;
    double admissible = 0.0;
    for (int k = 0; k <= limit; ++k) admissible += binomial(n, k);
    return 1.0 / admissible;
  }
  const int n_b = std::get<FixedCount>(model).n_b;
  return count == n_b ? 1.0 / binomial(n, n_b) : 0.0;
}

double report_probability(const ReportMatrix& r, const NodePlacement& a, const StateSequence& s,
                          Probability eps, Probability delta) {
  double p = 1.0;
  for (int i = 0; i < r.nodes(); ++i) {
    const double flip = a[i] ? delta : eps;
    for (int j = 0; j < r.components(); ++j) {
      p *= (r(i, j) == s[j]) ? 1.0 - flip : flip;
    }
  }
  return p;
}

double exact_likelihood(const ReportMatrix& r, const StateSequence& s,
                        const ByzantineModel& model, Probability eps, Probability delta) {
  const int n = r.nodes();
  if (r.components() != s.size()) throw std::invalid_argument("exact_likelihood: dimension mismatch");
  validate_model(model, n);

  if (n > 16) {
    const auto* ind = std::get_if<IndependentAlpha>(&model);
    if (ind == nullptr || n > 20) {
      throw std::length_error("exact_likelihood: network too large for exhaustive enumeration");
    }
    double total = 1.0;
    for (int i = 0; i < n; ++i) {
      double honest = 1.0;
      double byz = 1.0;
      for (int j = 0; j < r.components(); ++j) {
        const bool match = r(i, j) == s[j];
        honest *= match ? 1.0 - eps : eps;
        byz *= match ? 1.0 - delta : delta;
      }
      total *= (1.0 - ind->alpha) * honest + ind->alpha * byz;
    }
    return total;
  }

  double total = 0.0;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    const auto a = placement_from_code(code, n);
    const double prior = placement_probability(a, model);
    if (prior == 0.0) continue;
    total += report_probability(r, a, s, eps, delta) * prior;
  }
  return total;
}

StateSequence exact_map(const ReportMatrix& r, const FusionAssumption& assumption) {
  const int m = r.components();
  if (m > kMaxEnumeratedComponents) throw std::length_error("exact_map: too many components");
  const ByzantineModel& model = assumption.model;
  const double delta = assumption.delta_fc();

  std::vector<double> likelihood(std::size_t{1} << m);
  double best = 0.0;
  for (std::size_t c = 0; c < likelihood.size(); ++c) {
    likelihood[c] = exact_likelihood(r, StateSequence::FromCode(c, m), model, assumption.eps, delta);
    best = std::max(best, likelihood[c]);
  }
  std::size_t chosen = 0;
  if (best > 0.0) {
    const double threshold = best * std::exp(-kTieTolerance);
    while (likelihood[chosen] < threshold) ++chosen;
  }
  return StateSequence::FromCode(chosen, m);
}

ReportMatrix report_from_code(std::uint64_t code, int n, int m) {
  ReportMatrix r(n, m);
  const int total = n * m;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      r.set(i, j, static_cast<std::uint8_t>((code >> (total - 1 - (i * m + j))) & 1U));
    }
  }
  return r;
}

NodePlacement placement_from_code(std::uint64_t code, int n) {
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) flags[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((code >> (n - 1 - i)) & 1U);
  return NodePlacement(std::move(flags));
}

double exact_error_probability(const ExactScenario& sc, ErrorMetric metric) {
  sc.validate();
  const int n = sc.n;
  const int m = sc.m;
  const std::uint64_t reports = std::uint64_t{1} << (n * m);
  const std::uint64_t rows_per_node = std::uint64_t{1} << m;

  // fuse() is independent of the true state and placement, so decide once
  // per report matrix.
  const MapFusion rule(FusionAssumption{sc.fc_model, sc.eps, sc.pmal_fc}, n, m);
  std::vector<std::uint32_t> decision(reports);
  std::vector<std::uint32_t> rows(static_cast<std::size_t>(n));
  for (std::uint64_t code = 0; code < reports; ++code) {
    for (int i = 0; i < n; ++i) {
      rows[static_cast<std::size_t>(i)] =
          static_cast<std::uint32_t>((code >> ((n - 1 - i) * m)) & (rows_per_node - 1));
    }
    decision[code] = rule.decide(rows);
  }

  const double delta_b = crossover_delta({sc.eps, sc.pmal_b});
  double pe = 0.0;
  for (std::uint64_t s_code = 0; s_code < rows_per_node; ++s_code) {
    const auto s = StateSequence::FromCode(s_code, m);
    for (std::uint64_t a_code = 0; a_code < (std::uint64_t{1} << n); ++a_code) {
      const auto a = placement_from_code(a_code, n);
      const double prior = placement_probability(a, sc.true_model);
      if (prior == 0.0) continue;

      // P(row pattern | a_i, s) for every node and pattern.
      std::vector<double> row_prob(static_cast<std::size_t>(n) * rows_per_node);
      for (int i = 0; i < n; ++i) {
        const double flip = a[i] ? delta_b : sc.eps;
        for (std::uint64_t pattern = 0; pattern < rows_per_node; ++pattern) {
          const int mismatches = std::popcount(pattern ^ s_code);
          row_prob[static_cast<std::size_t>(i) * rows_per_node + pattern] =
              power(flip, mismatches) * power(1.0 - flip, m - mismatches);
        }
      }

      double conditional = 0.0;
      for (std::uint64_t code = 0; code < reports; ++code) {
        const int wrong = std::popcount(decision[code] ^ static_cast<std::uint32_t>(s_code));
        if (wrong == 0) continue;
        double p = 1.0;
        for (int i = 0; i < n && p != 0.0; ++i) {
          const auto pattern = (code >> ((n - 1 - i) * m)) & (rows_per_node - 1);
          p *= row_prob[static_cast<std::size_t>(i) * rows_per_node + pattern];
        }
        conditional += p * (metric == ErrorMetric::kPerComponent ? static_cast<double>(wrong) / m : 1.0);
      }
      pe += prior * conditional;
    }
  }
  return pe / static_cast<double>(rows_per_node);
}

FusionCheckResult check_fusion_grid() {
  const std::vector<ByzantineModel> models = {UnconstrainedMaxEntropy{}, IndependentAlpha{0.3},
                                              BoundedBelowHalf{}, FixedCount{1}};
  FusionCheckResult result;
  for (int n : {2, 3, 4}) {
    for (int m : {1, 2}) {
      for (const auto& model : models) {
        for (double eps : {0.1, 0.3}) {
          for (double pmal_fc : {0.5, 0.7, 1.0}) {
            const FusionAssumption assumption{model, eps, pmal_fc};
            ++result.scenarios;
            for (std::uint64_t code = 0; code < (std::uint64_t{1} << (n * m)); ++code) {
              const auto r = report_from_code(code, n, m);
              ++result.matrices;
              const auto fast = fuse(r, assumption);
              const auto exact = exact_map(r, assumption);
              if (fast == exact) continue;
              ++result.mismatches;
              if (result.failures.size() < 10) {
                result.failures.push_back("n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                          " model=" + to_string(model) +
                                          " eps=" + std::to_string(eps) +
                                          " pmal_fc=" + std::to_string(pmal_fc) +
                                          " report=" + std::to_string(code));
              }
            }
          }
        }
      }
    }
  }
  return result;
}

}  // namespace byzfuse::oracle

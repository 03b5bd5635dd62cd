#pragma once

// Subset-sum family f_{n,k}: the sum over all k-subsets I of the nodes of
//   prod_{i in I} b(i) * prod_{i not in I} h(i),
// evaluated in the log domain by the suffix recursion
//   f_{r,k} = b(n-r+1) f_{r-1,k-1} + h(n-r+1) f_{r-1,k},
// with closed-form leaves f_{r,0} = prod h and f_{r,r} = prod b over the suffix.

#include <cstdint>
#include <vector>

namespace byzfuse::dp {

// Per-node log-likelihoods: log_b[i] if node i is Byzantine, log_h[i] if it is
// honest. -infinity encodes a zero likelihood.
struct NodeWeights {
  std::vector<double> log_b;
  std::vector<double> log_h;

  NodeWeights() = default;
  NodeWeights(std::vector<double> log_b, std::vector<double> log_h);

  int size() const { return static_cast<int>(log_b.size()); }
};

// log(exp(a) + exp(b)); -infinity is the additive identity.
double log_add(double a, double b);

struct SubsetSumStats {
  // Number of two-term recursion steps evaluated (leaves excluded).
  std::int64_t interior_evaluations = 0;
};

// log f_{n,k}. Throws std::out_of_range unless 0 <= k <= n.
double subset_sum(const NodeWeights& w, int k, SubsetSumStats* stats = nullptr);

// log f_{n,k} for k = 0..k_max from one shared table.
// Throws std::out_of_range unless 0 <= k_max <= n.
std::vector<double> subset_sum_all(const NodeWeights& w, int k_max,
                                   SubsetSumStats* stats = nullptr);

// Memo table over (suffix length r, Byzantine count k) covering every cell the
// recursion needs for targets k_lo..k_hi. Unreached cells hold NaN.
class SubsetSumTable {
 public:
  SubsetSumTable(const NodeWeights& w, int k_lo, int k_hi);

  int nodes() const { return n_; }
  bool populated(int r, int k) const;
  // log f_{r,k} over the last r nodes. Throws std::out_of_range if the cell
  // was not populated.
  double at(int r, int k) const;
  const SubsetSumStats& stats() const { return stats_; }

 private:
  int n_;
  int k_hi_;
  std::vector<double> cells_;
  SubsetSumStats stats_;
};

// Literal sum over all k-subsets, log-domain accumulation.
// Throws std::length_error if C(n,k) exceeds 10^6 and std::out_of_range
// unless 0 <= k <= n.
double naive_subset_sum(const NodeWeights& w, int k);

}  // namespace byzfuse::dp

#include "byzfuse/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace byzfuse::dp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_k(const NodeWeights& w, int k, const char* what) {
  if (k < 0 || k > w.size()) {
    throw std::out_of_range(std::string(what) + ": k=" + std::to_string(k) +
                            " outside [0, " + std::to_string(w.size()) + "]");
  }
}

// Bottom-up fill over suffix lengths r = 0..n with two rolling rows. Calls
// visit(r, k, value) for every populated cell and returns row r = n.
template <typename Visit>
std::vector<double> fill(const NodeWeights& w, int k_lo, int k_hi, SubsetSumStats* stats,
                         Visit&& visit) {
  const int n = w.size();
  std::vector<double> prev(static_cast<std::size_t>(k_hi) + 1, kNegInf);
  std::vector<double> cur(prev.size(), kNegInf);

  prev[0] = 0.0;
  visit(0, 0, 0.0);

  double sum_b = 0.0;
  double sum_h = 0.0;
  std::int64_t interior = 0;
  for (int r = 1; r <= n; ++r) {
    const auto node = static_cast<std::size_t>(n - r);
    const double lb = w.log_b[node];
    const double lh = w.log_h[node];
    sum_b += lb;
    sum_h += lh;

    const int lo = std::max(0, k_lo - (n - r));
    const int hi = std::min(k_hi, r);
    for (int k = lo; k <= hi; ++k) {
      double value;
      if (k == 0) {
        value = sum_h;
      } else if (k == r) {
        value = sum_b;
      } else {
        value = log_add(lb + prev[static_cast<std::size_t>(k - 1)],
                        lh + prev[static_cast<std::size_t>(k)]);
        ++interior;
      }
      cur[static_cast<std::size_t>(k)] = value;
      visit(r, k, value);
    }
    std::swap(prev, cur);
  }
  if (stats != nullptr) stats->interior_evaluations += interior;
  return prev;
}

}  // namespace

NodeWeights::NodeWeights(std::vector<double> b, std::vector<double> h)
    : log_b(std::move(b)), log_h(std::move(h)) {
  if (log_b.size() != log_h.size()) {
    throw std::invalid_argument("NodeWeights: b and h must have equal length");
  }
  auto bad = [](double x) { return std::isnan(x) || x == std::numeric_limits<double>::infinity(); };
  if (std::any_of(log_b.begin(), log_b.end(), bad) ||
      std::any_of(log_h.begin(), log_h.end(), bad)) {
    throw std::invalid_argument("NodeWeights: log-weights must be finite or -infinity");
  }
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

double subset_sum(const NodeWeights& w, int k, SubsetSumStats* stats) {
  check_k(w, k, "subset_sum");
  auto row = fill(w, k, k, stats, [](int, int, double) {});
  return row[static_cast<std::size_t>(k)];
}

std::vector<double> subset_sum_all(const NodeWeights& w, int k_max, SubsetSumStats* stats) {
  check_k(w, k_max, "subset_sum_all");
  auto row = fill(w, 0, k_max, stats, [](int, int, double) {});
  row.resize(static_cast<std::size_t>(k_max) + 1);
  return row;
}

SubsetSumTable::SubsetSumTable(const NodeWeights& w, int k_lo, int k_hi)
    : n_(w.size()), k_hi_(k_hi) {
  check_k(w, k_hi, "SubsetSumTable");
  if (k_lo < 0 || k_lo > k_hi) throw std::out_of_range("SubsetSumTable: bad target range");
  cells_.assign(static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(k_hi + 1),
                std::numeric_limits<double>::quiet_NaN());
  fill(w, k_lo, k_hi, &stats_, [this](int r, int k, double value) {
    cells_[static_cast<std::size_t>(r) * static_cast<std::size_t>(k_hi_ + 1) +
           static_cast<std::size_t>(k)] = value;
  });
}

bool SubsetSumTable::populated(int r, int k) const {
  if (r < 0 || r > n_ || k < 0 || k > k_hi_) return false;
  return !std::isnan(cells_[static_cast<std::size_t>(r) * static_cast<std::size_t>(k_hi_ + 1) +
                            static_cast<std::size_t>(k)]);
}

double SubsetSumTable::at(int r, int k) const {
  if (!populated(r, k)) {
    throw std::out_of_range("SubsetSumTable: cell (" + std::to_string(r) + "," +
                            std::to_string(k) + ") not populated");
  }
  return cells_[static_cast<std::size_t>(r) * static_cast<std::size_t>(k_hi_ + 1) +
                static_cast<std::size_t>(k)];
}

double naive_subset_sum(const NodeWeights& w, int k) {
  check_k(w, k, "naive_subset_sum");
  const int n = w.size();

  double count = 1.0;
  for (int i = 0; i < k; ++i) count = count * (n - i) / (i + 1);
  if (count > 1e6) {
    throw std::length_error("naive_subset_sum: C(n,k) exceeds the 10^6 enumeration guard");
  }

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(count + 0.5));
  std::vector<int> subset(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;

  std::vector<std::uint8_t> chosen(static_cast<std::size_t>(n));
  while (true) {
    std::fill(chosen.begin(), chosen.end(), 0);
    for (int i : subset) chosen[static_cast<std::size_t>(i)] = 1;
    double term = 0.0;
    for (int i = 0; i < n; ++i) {
      term += chosen[static_cast<std::size_t>(i)] ? w.log_b[static_cast<std::size_t>(i)]
                                                  : w.log_h[static_cast<std::size_t>(i)];
    }
    terms.push_back(term);

    // Next k-combination in lexicographic order.
    int pos = k - 1;
    while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++subset[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k; ++i) {
      subset[static_cast<std::size_t>(i)] = subset[static_cast<std::size_t>(i - 1)] + 1;
    }
  }

  const double top = *std::max_element(terms.begin(), terms.end());
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

}  // namespace byzfuse::dp

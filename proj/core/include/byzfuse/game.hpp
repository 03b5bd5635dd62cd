#pragma once

// The FC-vs-Byzantines zero-sum game over quantized flipping probabilities.
// Rows are Byzantine strategies (maximizer), columns are FC strategies
// (minimizer), and entries are error probabilities at the FC.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "byzfuse/fusion.hpp"
#include "byzfuse/model.hpp"

namespace byzfuse {

enum class ErrorMetric {
  kPerComponent,  // (1/m) E[Hamming(decision, state)]
  kPerSequence,   // P(decision != state)
};

std::string to_string(ErrorMetric metric);
// Accepts "per-component" and "per-sequence".
ErrorMetric parse_metric(std::string_view text);

// Strictly ascending probabilities.
class StrategyGrid {
 public:
  // {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}
  StrategyGrid();
  explicit StrategyGrid(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::optional<std::size_t> index_of(double value) const;

  friend bool operator==(const StrategyGrid&, const StrategyGrid&) = default;

 private:
  std::vector<double> values_;
};

struct Scenario {
  int n = 20;
  int m = 4;
  Probability eps = 0.1;
  ByzantineModel true_model = IndependentAlpha{0.3};
  ByzantineModel fc_model = IndependentAlpha{0.3};

  // Throws std::invalid_argument.
  void validate() const;
};

struct PayoffMatrix {
  StrategyGrid grid_b;
  StrategyGrid grid_fc;
  Eigen::MatrixXd pe;       // grid_b.size() x grid_fc.size()
  Eigen::MatrixXd std_err;  // standard error of each entry; zero if unknown
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  ErrorMetric metric = ErrorMetric::kPerComponent;
};

struct PayoffEstimate {
  PayoffMatrix per_component;
  PayoffMatrix per_sequence;

  const PayoffMatrix& select(ErrorMetric metric) const {
    return metric == ErrorMetric::kPerComponent ? per_component : per_sequence;
  }
};

// Seed of the realizations used for Byzantine strategy `row`.
std::uint64_t row_seed(std::uint64_t seed, std::size_t row);

// Monte Carlo payoff matrix. Row b draws `trials` realizations of
// (states, placement, report noise) from row_seed(seed, b); every column
// fuses the identical realizations with its own pmal_fc. Deterministic in
// (scenario, grids, trials, seed) and independent of `threads`.
PayoffEstimate estimate_payoff_matrix(const Scenario& scenario, const StrategyGrid& grid_b,
                                      const StrategyGrid& grid_fc, std::int64_t trials,
                                      std::uint64_t seed, int threads = 1);

struct ErrorEstimate {
  double per_component = 0.0;
  double per_sequence = 0.0;
  double se_component = 0.0;
  double se_sequence = 0.0;
  std::int64_t trials = 0;

  double value(ErrorMetric metric) const {
    return metric == ErrorMetric::kPerComponent ? per_component : per_sequence;
  }
};

// Majority fusion on realizations drawn from `stream_seed` (pass row_seed()
// to share realizations with a payoff-matrix row).
ErrorEstimate estimate_majority_error(const Scenario& scenario, double pmal_b,
                                      std::int64_t trials, std::uint64_t stream_seed,
                                      int threads = 1);

// Row r with pe(r,c) > pe(r',c) for every other row r' and every column c.
std::optional<std::size_t> find_dominant_row(const Eigen::MatrixXd& pe);
// Row r with pe(r,c) >= pe(r',c) everywhere and strictly greater in at least
// one column against each other row.
std::optional<std::size_t> find_weakly_dominant_row(const Eigen::MatrixXd& pe);

struct DominanceReport {
  // Separated from every other row by more than z combined standard errors
  // in every column.
  std::optional<std::size_t> strict_row;
  // Never exceeded by another row by more than z combined standard errors.
  std::vector<std::size_t> best_response_rows;
  // Exact arg-max row of each column (first on ties).
  std::vector<std::size_t> column_best_response;
};

DominanceReport assess_dominance(const PayoffMatrix& pm, double z = 3.0);

struct PureProfile {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const PureProfile&, const PureProfile&) = default;
};

// Saddle points with exact comparisons: pe(r*,c*) >= pe(r,c*) for all r and
// pe(r*,c*) <= pe(r*,c) for all c. Row-major order.
std::vector<PureProfile> find_pure_equilibria(const Eigen::MatrixXd& pe);

// Saddle points where each inequality may be violated by at most z combined
// standard errors.
std::vector<PureProfile> find_pure_equilibria(const PayoffMatrix& pm, double z);

struct MixedProfile {
  std::vector<double> row;
  std::vector<double> col;
};

struct Equilibrium {
  std::variant<PureProfile, MixedProfile> kind;
  double value = 0.0;
  std::optional<std::size_t> dominant_row;

  bool is_pure() const { return std::holds_alternative<PureProfile>(kind); }
  // Pure profiles expand to one-hot distributions.
  std::vector<double> row_strategy(std::size_t rows) const;
  std::vector<double> col_strategy(std::size_t cols) const;
};

// Guaranteed payoffs of (p, q): lower = min_c (p^T A)_c, upper = max_r (A q)_r.
struct ValueBounds {
  double lower = 0.0;
  double upper = 0.0;
};
ValueBounds value_bounds(const Eigen::MatrixXd& pe, const std::vector<double>& p,
                         const std::vector<double>& q);

// Maximin/minimax strategies of the zero-sum game. Returns a PureProfile with
// the exact entry as value when a saddle point exists; otherwise solves the
// primal/dual linear programs and checks the duality gap against tol,
// falling back to support enumeration for matrices up to 10x10.
// Throws std::invalid_argument on empty or non-finite matrices and
// std::runtime_error if no solution meets tol.
Equilibrium solve_mixed(const Eigen::MatrixXd& pe, double tol = 1e-9);

// Linear-programming route only.
MixedProfile solve_mixed_lp(const Eigen::MatrixXd& pe);
// Exhaustive search over square supports. std::nullopt if nothing meets tol.
std::optional<MixedProfile> solve_by_support_enumeration(const Eigen::MatrixXd& pe,
                                                         double tol = 1e-9);

struct ReducedGame {
  Eigen::MatrixXd pe;
  std::vector<std::size_t> rows;  // original row index of each kept row
  std::vector<std::size_t> cols;
};

// Iterated elimination of strictly dominated rows (maximizer) and columns
// (minimizer).
ReducedGame eliminate_dominated(const Eigen::MatrixXd& pe);

// Header "pmal_b\pmal_fc,<fc values>", then one line per Byzantine strategy.
// Numbers use 6 significant digits independent of locale. Lines in `comment`
// are emitted first, each prefixed with "# ".
std::string to_csv(const PayoffMatrix& pm, std::string_view comment = {});
std::string std_err_to_csv(const PayoffMatrix& pm, std::string_view comment = {});
// Parses to_csv output; '#' lines are skipped. Throws std::invalid_argument.
PayoffMatrix payoff_from_csv(std::string_view text);
// Markdown table with rows = Byzantine strategies, entries scaled by 10^k.
std::string to_markdown(const PayoffMatrix& pm);

// Shortest locale-independent rendering with at most 6 significant digits.
std::string format_number(double value);

}  // namespace byzfuse

#include "byzfuse/game.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace byzfuse {

namespace {

struct Tally {
  std::int64_t hamming = 0;
  std::int64_t hamming_sq = 0;
  std::int64_t sequence_errors = 0;
};

// Runs fn(begin, end, tallies) over contiguous trial ranges and sums the
// integer tallies, so the result does not depend on the thread count.
template <typename Fn>
std::vector<Tally> run_partitioned(std::int64_t trials, int threads, std::size_t deciders,
                                   Fn&& fn) {
  const auto workers = static_cast<std::int64_t>(
      std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(trials, 1)));
  std::vector<std::vector<Tally>> partial(static_cast<std::size_t>(workers),
                                          std::vector<Tally>(deciders));
  if (workers == 1) {
    fn(std::int64_t{0}, trials, partial[0]);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int64_t w = 0; w < workers; ++w) {
      const std::int64_t begin = trials * w / workers;
      const std::int64_t end = trials * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          fn(begin, end, partial[static_cast<std::size_t>(w)]);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<Tally> total(deciders);
  for (const auto& part : partial) {
    for (std::size_t d = 0; d < deciders; ++d) {
      total[d].hamming += part[d].hamming;
      total[d].hamming_sq += part[d].hamming_sq;
      total[d].sequence_errors += part[d].sequence_errors;
    }
  }
  return total;
}

// Draws the realizations of one row and scores `deciders` decision rules on
// each. decide(d, rows) returns the packed decision of rule d.
template <typename Decide>
std::vector<Tally> simulate_row(const Scenario& sc, double pmal_b, std::uint64_t stream_seed,
                                std::int64_t trials, int threads, std::size_t deciders,
                                Decide&& decide) {
  return run_partitioned(trials, threads, deciders,
                         [&](std::int64_t begin, std::int64_t end, std::vector<Tally>& tally) {
    for (std::int64_t t = begin; t < end; ++t) {
      RandomStream rng(derive_seed(stream_seed, static_cast<std::uint64_t>(t)));
      const auto s = sample_states(rng, sc.m);
      const auto a = sample_placement(rng, sc.true_model, sc.n);
      const auto r = sample_reports(rng, s, a, sc.eps, pmal_b);
      const auto rows = r.packed_rows();
      const auto truth = static_cast<std::uint32_t>(s.code());
      for (std::size_t d = 0; d < deciders; ++d) {
        const std::int64_t errors = std::popcount(decide(d, rows) ^ truth);
        tally[d].hamming += errors;
        tally[d].hamming_sq += errors * errors;
        tally[d].sequence_errors += errors > 0 ? 1 : 0;
      }
    }
  });
}

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

// Mean and standard error of x_t = count_t / scale from integer sums.
Moments moments(std::int64_t sum, std::int64_t sum_sq, std::int64_t trials, double scale) {
  Moments out;
  if (trials <= 0) return out;
  const double t = static_cast<double>(trials);
  out.mean = static_cast<double>(sum) / (scale * t);
  const double second = static_cast<double>(sum_sq) / (scale * scale * t);
  const double var = std::max(0.0, second - out.mean * out.mean) * t / std::max(1.0, t - 1.0);
  out.se = std::sqrt(var / t);
  return out;
}

void require_finite(const Eigen::MatrixXd& pe) {
  if (pe.size() == 0) throw std::invalid_argument("payoff matrix is empty");
  if (!pe.allFinite()) throw std::invalid_argument("payoff matrix has non-finite entries");
}

double combined_se(const PayoffMatrix& pm, Eigen::Index r1, Eigen::Index c1, Eigen::Index r2,
                   Eigen::Index c2) {
  if (pm.std_err.rows() != pm.pe.rows() || pm.std_err.cols() != pm.pe.cols()) return 0.0;
  const double a = pm.std_err(r1, c1);
  const double b = pm.std_err(r2, c2);
  return std::sqrt(a * a + b * b);
}

std::vector<double> normalized(const Eigen::VectorXd& v) {
  std::vector<double> out(static_cast<std::size_t>(v.size()));
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[static_cast<std::size_t>(i)] = std::max(0.0, v(i));
    sum += out[static_cast<std::size_t>(i)];
  }
  for (auto& x : out) x /= sum;
  return out;
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double bilinear(const Eigen::MatrixXd& pe, const std::vector<double>& p,
                const std::vector<double>& q) {
  return as_vector(p).dot(pe * as_vector(q));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("payoff CSV: not a number: '" + std::string(text) + "'");
  }
  return value;
}

void append_comment(std::string& out, std::string_view comment) {
  if (comment.empty()) return;
  for (auto line : split(comment, '\n')) {
    if (line.empty()) continue;
    out += "# ";
    out += line;
    out += '\n';
  }
}

std::string matrix_csv(const PayoffMatrix& pm, const Eigen::MatrixXd& values,
                       std::string_view comment) {
  std::string out;
  append_comment(out, comment);
  out += "pmal_b\\pmal_fc";
  for (double v : pm.grid_fc.values()) out += "," + format_number(v);
  out += '\n';
  for (std::size_t b = 0; b < pm.grid_b.size(); ++b) {
    out += format_number(pm.grid_b[b]);
    for (std::size_t c = 0; c < pm.grid_fc.size(); ++c) {
      out += "," + format_number(values(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)));
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string to_string(ErrorMetric metric) {
  return metric == ErrorMetric::kPerComponent ? "per-component" : "per-sequence";
}

ErrorMetric parse_metric(std::string_view text) {
  if (text == "per-component") return ErrorMetric::kPerComponent;
  if (text == "per-sequence") return ErrorMetric::kPerSequence;
  throw std::invalid_argument("unknown error metric '" + std::string(text) +
                              "' (expected per-component or per-sequence)");
}

StrategyGrid::StrategyGrid() : values_{0.5, 0.6, 0.7, 0.8, 0.9, 1.0} {}

StrategyGrid::StrategyGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("strategy grid is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0 && values_[i] <= 1.0)) {
      throw std::invalid_argument("strategy grid values must lie in [0,1]");
    }
    if (i > 0 && !(values_[i] > values_[i - 1])) {
      throw std::invalid_argument("strategy grid must be strictly ascending");
    }
  }
}

std::optional<std::size_t> StrategyGrid::index_of(double value) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (std::abs(values_[i] - value) < 1e-12) return i;
  }
  return std::nullopt;
}

void Scenario::validate() const {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (m > kMaxEnumeratedComponents) {
    throw std::invalid_argument("m=" + std::to_string(m) + " exceeds the 2^m enumeration limit of " +
                                std::to_string(kMaxEnumeratedComponents));
  }
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in [0,1]");
  validate_model(true_model, n);
  validate_model(fc_model, n);
}

std::uint64_t row_seed(std::uint64_t seed, std::size_t row) {
  return derive_seed(seed, static_cast<std::uint64_t>(row));
}

PayoffEstimate estimate_payoff_matrix(const Scenario& scenario, const StrategyGrid& grid_b,
                                      const StrategyGrid& grid_fc, std::int64_t trials,
                                      std::uint64_t seed, int threads) {
  scenario.validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");

  std::vector<MapFusion> rules;
  rules.reserve(grid_fc.size());
  for (double pmal_fc : grid_fc.values()) {
    rules.emplace_back(FusionAssumption{scenario.fc_model, scenario.eps, pmal_fc}, scenario.n,
                       scenario.m);
  }

  const auto rows = static_cast<Eigen::Index>(grid_b.size());
  const auto cols = static_cast<Eigen::Index>(grid_fc.size());
  PayoffEstimate out;
  for (auto* pm : {&out.per_component, &out.per_sequence}) {
    pm->grid_b = grid_b;
    pm->grid_fc = grid_fc;
    pm->pe = Eigen::MatrixXd::Zero(rows, cols);
    pm->std_err = Eigen::MatrixXd::Zero(rows, cols);
    pm->trials = trials;
    pm->seed = seed;
  }
  out.per_component.metric = ErrorMetric::kPerComponent;
  out.per_sequence.metric = ErrorMetric::kPerSequence;

  for (std::size_t b = 0; b < grid_b.size(); ++b) {
    const auto tallies = simulate_row(
        scenario, grid_b[b], row_seed(seed, b), trials, threads, rules.size(),
        [&](std::size_t d, std::span<const std::uint32_t> r) { return rules[d].decide(r); });
    for (std::size_t c = 0; c < rules.size(); ++c) {
      const auto& t = tallies[c];
      const auto comp = moments(t.hamming, t.hamming_sq, trials, scenario.m);
      const auto seq = moments(t.sequence_errors, t.sequence_errors, trials, 1.0);
      const auto bi = static_cast<Eigen::Index>(b);
      const auto ci = static_cast<Eigen::Index>(c);
      out.per_component.pe(bi, ci) = comp.mean;
      out.per_component.std_err(bi, ci) = comp.se;
      out.per_sequence.pe(bi, ci) = seq.mean;
      out.per_sequence.std_err(bi, ci) = seq.se;
    }
  }
  return out;
}

ErrorEstimate estimate_majority_error(const Scenario& scenario, double pmal_b,
                                      std::int64_t trials, std::uint64_t stream_seed,
                                      int threads) {
  scenario.validate();
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (!(pmal_b >= 0.0 && pmal_b <= 1.0)) throw std::invalid_argument("pmal_b must lie in [0,1]");
  const auto tallies = simulate_row(
      scenario, pmal_b, stream_seed, trials, threads, 1,
      [&](std::size_t, std::span<const std::uint32_t> r) {
        return majority_decision(r, scenario.m);
      });
  const auto comp = moments(tallies[0].hamming, tallies[0].hamming_sq, trials, scenario.m);
  const auto seq = moments(tallies[0].sequence_errors, tallies[0].sequence_errors, trials, 1.0);
  return {comp.mean, seq.mean, comp.se, seq.se, trials};
}

std::optional<std::size_t> find_dominant_row(const Eigen::MatrixXd& pe) {
  for (Eigen::Index r = 0; r < pe.rows(); ++r) {
    bool dominant = true;
    for (Eigen::Index other = 0; other < pe.rows() && dominant; ++other) {
      if (other == r) continue;
      dominant = (pe.row(r).array() > pe.row(other).array()).all();
    }
    if (dominant) return static_cast<std::size_t>(r);
  }
  return std::nullopt;
}

std::optional<std::size_t> find_weakly_dominant_row(const Eigen::MatrixXd& pe) {
  for (Eigen::Index r = 0; r < pe.rows(); ++r) {
    bool dominant = true;
    for (Eigen::Index other = 0; other < pe.rows() && dominant; ++other) {
      if (other == r) continue;
      dominant = (pe.row(r).array() >= pe.row(other).array()).all() &&
                 (pe.row(r).array() > pe.row(other).array()).any();
    }
    if (dominant) return static_cast<std::size_t>(r);
  }
  return std::nullopt;
}

DominanceReport assess_dominance(const PayoffMatrix& pm, double z) {
  const auto& pe = pm.pe;
  DominanceReport report;
  for (Eigen::Index c = 0; c < pe.cols(); ++c) {
    Eigen::Index best = 0;
    pe.col(c).maxCoeff(&best);
    report.column_best_response.push_back(static_cast<std::size_t>(best));
  }
  for (Eigen::Index r = 0; r < pe.rows(); ++r) {
    bool strict = true;
    bool best_response = true;
    for (Eigen::Index other = 0; other < pe.rows(); ++other) {
      if (other == r) continue;
      for (Eigen::Index c = 0; c < pe.cols(); ++c) {
        const double margin = z * combined_se(pm, r, c, other, c);
        const double gap = pe(r, c) - pe(other, c);
        if (!(gap > margin)) strict = false;
        if (gap < -margin) best_response = false;
      }
    }
    if (strict && !report.strict_row) report.strict_row = static_cast<std::size_t>(r);
    if (best_response) report.best_response_rows.push_back(static_cast<std::size_t>(r));
  }
  return report;
}

std::vector<PureProfile> find_pure_equilibria(const Eigen::MatrixXd& pe) {
  std::vector<PureProfile> out;
  for (Eigen::Index r = 0; r < pe.rows(); ++r) {
    for (Eigen::Index c = 0; c < pe.cols(); ++c) {
      const double v = pe(r, c);
      if ((pe.col(c).array() <= v).all() && (pe.row(r).array() >= v).all()) {
        out.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
      }
    }
  }
  return out;
}

std::vector<PureProfile> find_pure_equilibria(const PayoffMatrix& pm, double z) {
  const auto& pe = pm.pe;
  std::vector<PureProfile> out;
  for (Eigen::Index r = 0; r < pe.rows(); ++r) {
    for (Eigen::Index c = 0; c < pe.cols(); ++c) {
      const double v = pe(r, c);
      bool saddle = true;
      for (Eigen::Index other = 0; other < pe.rows() && saddle; ++other) {
        saddle = pe(other, c) <= v + z * combined_se(pm, r, c, other, c);
      }
      for (Eigen::Index other = 0; other < pe.cols() && saddle; ++other) {
        saddle = pe(r, other) >= v - z * combined_se(pm, r, c, r, other);
      }
      if (saddle) out.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
    }
  }
  return out;
}

std::vector<double> Equilibrium::row_strategy(std::size_t rows) const {
  if (const auto* pure = std::get_if<PureProfile>(&kind)) {
    std::vector<double> out(rows, 0.0);
    out.at(pure->row) = 1.0;
    return out;
  }
  return std::get<MixedProfile>(kind).row;
}

std::vector<double> Equilibrium::col_strategy(std::size_t cols) const {
  if (const auto* pure = std::get_if<PureProfile>(&kind)) {
    std::vector<double> out(cols, 0.0);
    out.at(pure->col) = 1.0;
    return out;
  }
  return std::get<MixedProfile>(kind).col;
}

ValueBounds value_bounds(const Eigen::MatrixXd& pe, const std::vector<double>& p,
                         const std::vector<double>& q) {
  if (static_cast<Eigen::Index>(p.size()) != pe.rows() ||
      static_cast<Eigen::Index>(q.size()) != pe.cols()) {
    throw std::invalid_argument("value_bounds: strategy sizes do not match the matrix");
  }
  const Eigen::RowVectorXd row_payoffs = as_vector(p).transpose() * pe;
  const Eigen::VectorXd col_payoffs = pe * as_vector(q);
  return {row_payoffs.minCoeff(), col_payoffs.maxCoeff()};
}

MixedProfile solve_mixed_lp(const Eigen::MatrixXd& pe) {
  require_finite(pe);
  const Eigen::Index rows = pe.rows();
  const Eigen::Index cols = pe.cols();

  // Affine rescaling to entries in [1, 2] keeps both LPs feasible and bounded
  // without changing the optimal strategies.
  const double lo = pe.minCoeff();
  const double span = pe.maxCoeff() - lo;
  const double scale = span > 0.0 ? 1.0 / span : 1.0;
  const Eigen::MatrixXd shifted = ((pe.array() - lo) * scale + 1.0).matrix();

  // Column player: max sum(y) s.t. shifted * y <= 1, y >= 0. The dual
  // (row player) prices sit under the slack columns of the objective row.
  const Eigen::Index width = cols + rows + 1;
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(rows + 1, width);
  tab.block(0, 0, rows, cols) = shifted;
  tab.block(0, cols, rows, rows).setIdentity();
  tab.col(width - 1).head(rows).setOnes();
  tab.row(rows).head(cols).setConstant(-1.0);

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  std::iota(basis.begin(), basis.end(), cols);

  constexpr double kPivotEps = 1e-12;
  const Eigen::Index max_iterations = 50 * (rows + cols + 1);
  for (Eigen::Index iter = 0;; ++iter) {
    if (iter > max_iterations) throw std::runtime_error("simplex did not converge");
    // Bland's rule: lowest-index improving column, lowest-index leaving basic.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < width - 1; ++j) {
      if (tab(rows, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (tab(i, enter) <= kPivotEps) continue;
      const double ratio = tab(i, width - 1) / tab(i, enter);
      if (ratio < best_ratio - 1e-15 ||
          (leave >= 0 && std::abs(ratio - best_ratio) <= 1e-15 &&
           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) throw std::runtime_error("simplex: unbounded column player LP");

    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= rows; ++i) {
      if (i != leave && tab(i, enter) != 0.0) tab.row(i) -= tab(i, enter) * tab.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (basis[static_cast<std::size_t>(i)] < cols) y(basis[static_cast<std::size_t>(i)]) = tab(i, width - 1);
  }
  const Eigen::VectorXd x = tab.row(rows).segment(cols, rows).transpose();
  return {normalized(x), normalized(y)};
}

std::optional<MixedProfile> solve_by_support_enumeration(const Eigen::MatrixXd& pe, double tol) {
  require_finite(pe);
  const auto rows = static_cast<int>(pe.rows());
  const auto cols = static_cast<int>(pe.cols());

  // Solves [M^T -1; 1^T 0] [p; v] = [0; 1] for p with p^T M = v 1^T.
  auto equalizer = [](const Eigen::MatrixXd& m) -> std::optional<Eigen::VectorXd> {
    const Eigen::Index k = m.rows();
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(k + 1, k + 1);
    sys.block(0, 0, k, k) = m.transpose();
    sys.block(0, k, k, 1).setConstant(-1.0);
    sys.block(k, 0, 1, k).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs(k) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    if (lu.rank() < k + 1) return std::nullopt;
    return Eigen::VectorXd(lu.solve(rhs).head(k));
  };

  auto subsets = [](int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      out.push_back(idx);
      int pos = k - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[static_cast<std::size_t>(pos)];
      for (int i = pos + 1; i < k; ++i) idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
    return out;
  };

  for (int k = 1; k <= std::min(rows, cols); ++k) {
    const auto row_sets = subsets(rows, k);
    const auto col_sets = subsets(cols, k);
    for (const auto& rs : row_sets) {
      for (const auto& cs : col_sets) {
        Eigen::MatrixXd sub(k, k);
        for (int i = 0; i < k; ++i) {
          for (int j = 0; j < k; ++j) sub(i, j) = pe(rs[static_cast<std::size_t>(i)], cs[static_cast<std::size_t>(j)]);
        }
        const auto p_sub = equalizer(sub);
        if (!p_sub || p_sub->minCoeff() < -tol) continue;
        const auto q_sub = equalizer(sub.transpose());
        if (!q_sub || q_sub->minCoeff() < -tol) continue;

        Eigen::VectorXd p = Eigen::VectorXd::Zero(rows);
        Eigen::VectorXd q = Eigen::VectorXd::Zero(cols);
        for (int i = 0; i < k; ++i) {
          p(rs[static_cast<std::size_t>(i)]) = (*p_sub)(i);
          q(cs[static_cast<std::size_t>(i)]) = (*q_sub)(i);
        }
        MixedProfile candidate{normalized(p), normalized(q)};
        const auto bounds = value_bounds(pe, candidate.row, candidate.col);
        if (bounds.upper - bounds.lower <= tol) return candidate;
      }
    }
  }
  return std::nullopt;
}

Equilibrium solve_mixed(const Eigen::MatrixXd& pe, double tol) {
  require_finite(pe);
  Equilibrium eq;
  eq.dominant_row = find_dominant_row(pe);

  const auto saddles = find_pure_equilibria(pe);
  if (!saddles.empty()) {
    eq.kind = saddles.front();
    eq.value = pe(static_cast<Eigen::Index>(saddles.front().row),
                  static_cast<Eigen::Index>(saddles.front().col));
    return eq;
  }

  auto profile = solve_mixed_lp(pe);
  auto bounds = value_bounds(pe, profile.row, profile.col);
  if (bounds.upper - bounds.lower > tol) {
    if (pe.rows() > 10 || pe.cols() > 10) {
      throw std::runtime_error("mixed equilibrium: LP duality gap exceeds tolerance");
    }
    auto fallback = solve_by_support_enumeration(pe, tol);
    if (!fallback) throw std::runtime_error("mixed equilibrium: no solution within tolerance");
    profile = std::move(*fallback);
  }
  eq.value = bilinear(pe, profile.row, profile.col);
  eq.kind = std::move(profile);
  return eq;
}

ReducedGame eliminate_dominated(const Eigen::MatrixXd& pe) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(pe.rows()));
  std::vector<std::size_t> cols(static_cast<std::size_t>(pe.cols()));
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  auto at = [&](std::size_t r, std::size_t c) {
    return pe(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < rows.size() && rows.size() > 1; ++i) {
      const bool dominated = std::any_of(rows.begin(), rows.end(), [&](std::size_t other) {
        return other != rows[i] && std::all_of(cols.begin(), cols.end(), [&](std::size_t c) {
                 return at(other, c) > at(rows[i], c);
               });
      });
      if (dominated) {
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
    if (changed) continue;
    for (std::size_t j = 0; j < cols.size() && cols.size() > 1; ++j) {
      const bool dominated = std::any_of(cols.begin(), cols.end(), [&](std::size_t other) {
        return other != cols[j] && std::all_of(rows.begin(), rows.end(), [&](std::size_t r) {
                 return at(r, other) < at(r, cols[j]);
               });
      });
      if (dominated) {
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
        break;
      }
    }
  }

  ReducedGame out;
  out.rows = rows;
  out.cols = cols;
  out.pe.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out.pe(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = at(rows[i], cols[j]);
    }
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 6);
  if (ec != std::errc()) throw std::runtime_error("format_number failed");
  return std::string(buf, ptr);
}

std::string to_csv(const PayoffMatrix& pm, std::string_view comment) {
  return matrix_csv(pm, pm.pe, comment);
}

std::string std_err_to_csv(const PayoffMatrix& pm, std::string_view comment) {
  return matrix_csv(pm, pm.std_err, comment);
}

PayoffMatrix payoff_from_csv(std::string_view text) {
  std::vector<std::vector<std::string_view>> lines;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(split(line, ','));
  }
  if (lines.size() < 2) throw std::invalid_argument("payoff CSV: need a header and at least one row");

  std::vector<double> fc;
  for (std::size_t i = 1; i < lines[0].size(); ++i) fc.push_back(parse_number(lines[0][i]));
  if (fc.empty()) throw std::invalid_argument("payoff CSV: header has no FC strategies");

  std::vector<double> byz;
  Eigen::MatrixXd pe(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(fc.size()));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].size() != fc.size() + 1) {
      throw std::invalid_argument("payoff CSV: row " + std::to_string(r) + " has " +
                                  std::to_string(lines[r].size()) + " fields, expected " +
                                  std::to_string(fc.size() + 1));
    }
    byz.push_back(parse_number(lines[r][0]));
    for (std::size_t c = 0; c < fc.size(); ++c) {
      pe(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = parse_number(lines[r][c + 1]);
    }
  }

  PayoffMatrix pm;
  pm.grid_b = StrategyGrid(std::move(byz));
  pm.grid_fc = StrategyGrid(std::move(fc));
  pm.pe = std::move(pe);
  pm.std_err = Eigen::MatrixXd::Zero(pm.pe.rows(), pm.pe.cols());
  return pm;
}

std::string to_markdown(const PayoffMatrix& pm) {
  const double top = pm.pe.size() > 0 ? pm.pe.maxCoeff() : 0.0;
  int exponent = 0;
  if (top > 0.0 && top < 1.0) exponent = static_cast<int>(std::floor(-std::log10(top))) + 1;
  const double scale = std::pow(10.0, exponent);

  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << "Payoff (" << (exponent == 0 ? std::string("") : "10^" + std::to_string(exponent) + " x ")
     << "P_e, " << to_string(pm.metric) << ", " << pm.trials << " trials, seed " << pm.seed
     << ")\n\n";
  os << "| P_mal^B \\ P_mal^FC |";
  for (double v : pm.grid_fc.values()) os << ' ' << format_number(v) << " |";
  os << "\n|---|";
  for (std::size_t c = 0; c < pm.grid_fc.size(); ++c) os << "---|";
  os << '\n';
  for (std::size_t b = 0; b < pm.grid_b.size(); ++b) {
    os << "| " << format_number(pm.grid_b[b]) << " |";
    for (std::size_t c = 0; c < pm.grid_fc.size(); ++c) {
      os << ' ' << format_number(pm.pe(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(c)) * scale)
         << " |";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace byzfuse

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `--slow` runs only the m = 10 spot check.

#include <algorithm>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "byzfuse/dp.hpp"
#include "byzfuse/experiment.hpp"
#include "byzfuse/fusion.hpp"
#include "byzfuse/game.hpp"
#include "byzfuse/oracle.hpp"
#include "printed_tables.hpp"

namespace {

namespace fs = std::filesystem;
using namespace byzfuse;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, std::string_view name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = check();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!outcome.pass) ++failures;
  std::printf("%s %2d %s: %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", id,
              std::string(name).c_str(), outcome.detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(double v) { return format_number(v); }

fs::path workdir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "byzfuse_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

ExperimentConfig table_config(const std::string& model, const fs::path& out) {
  auto config = parse_config("n = 20\nm = 4\neps = 0.1\ntrials = 50000\nseed = 1\ntrue_model = " + model + "\n");
  config.output_dir = out;
  return config;
}

dp::NodeWeights random_weights(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(-8.0, 0.0);
  dp::NodeWeights w;
  for (int i = 0; i < n; ++i) {
    w.log_b.push_back(u(gen));
    w.log_h.push_back(u(gen));
  }
  return w;
}

Outcome dp_correctness() {
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<int> size(1, 12);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto w = random_weights(gen, size(gen));
    for (int k = 0; k <= w.size(); ++k) {
      const double fast = dp::subset_sum(w, k);
      const double naive = dp::naive_subset_sum(w, k);
      worst = std::max(worst, std::abs(std::expm1(fast - naive)));
    }
  }
  return {worst <= 1e-12, "max relative gap " + fmt(worst) + " over 200 weight sets"};
}

Outcome dp_complexity() {
  std::int64_t violations = 0;
  double worst_ratio = 0.0;
  for (int n = 1; n <= 30; ++n) {
    const dp::NodeWeights w(std::vector<double>(static_cast<std::size_t>(n), -1.0),
                            std::vector<double>(static_cast<std::size_t>(n), -0.5));
    for (int k = 0; k <= n; ++k) {
      dp::SubsetSumStats stats;
      dp::subset_sum(w, k, &stats);
      const auto bound = static_cast<std::int64_t>(k) * (n - k + 1);
      if (stats.interior_evaluations > bound) ++violations;
      if (bound > 0) worst_ratio = std::max(worst_ratio, static_cast<double>(stats.interior_evaluations) / bound);
    }
  }
  return {violations == 0, std::to_string(violations) + " violations, max count/bound " + fmt(worst_ratio)};
}

Outcome oracle_equivalence() {
  const auto result = oracle::check_fusion_grid();
  std::string detail = std::to_string(result.mismatches) + " mismatches over " +
                       std::to_string(result.matrices) + " report matrices in " +
                       std::to_string(result.scenarios) + " scenarios";
  if (!result.failures.empty()) detail += "; first: " + result.failures.front();
  return {result.mismatches == 0, detail};
}

Outcome factorization_identity() {
  std::mt19937_64 gen(404);
  std::uniform_int_distribution<int> nodes(1, 6);
  std::uniform_int_distribution<int> comps(1, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = nodes(gen);
    const int m = comps(gen);
    const double alpha = u(gen);
    const double eps = 0.5 * u(gen);
    const double delta = crossover_delta({eps, 0.5 + 0.5 * u(gen)});
    const auto r = oracle::report_from_code(gen() & ((std::uint64_t{1} << (n * m)) - 1), n, m);
    const auto s = StateSequence::FromCode(gen() & ((std::uint64_t{1} << m) - 1), m);
    const double exact = oracle::exact_likelihood(r, s, IndependentAlpha{alpha}, eps, delta);
    const double fast = std::exp(log_score_independent(r, s, alpha, eps, delta));
    worst = std::max(worst, std::abs(fast - exact) / exact);
  }
  return {worst <= 1e-12, "max relative gap " + fmt(worst) + " over 1000 inputs"};
}

Outcome table_independent(const fs::path& out) {
  const auto pm = run_payoff(table_config("independent:0.3", out));
  const double cell = pm.pe(5, 5);
  const auto dominance = assess_dominance(pm);
  bool full_flip_everywhere = true;
  for (auto r : dominance.column_best_response) full_flip_everywhere &= (r == 5);
  const bool cell_ok = std::abs(cell - 0.0349) <= 0.003;
  return {cell_ok && full_flip_everywhere,
          "P_e(1.0,1.0) = " + fmt(cell) + " (target 0.0349 +- 0.003); row 1.0 best response in every column: " +
              (full_flip_everywhere ? "yes" : "no")};
}

Outcome table_fixed6() {
  const auto report = run_equilibrium(table_config("fixed:6", workdir("fixed6")));
  const auto& pm = report.matrix;
  const double cell = pm.pe(0, 0);
  const PureProfile target{0, 0};
  const bool exact_saddle = std::find(report.saddles.begin(), report.saddles.end(), target) != report.saddles.end();
  const bool noisy_saddle = std::find(report.saddles_within_noise.begin(), report.saddles_within_noise.end(),
                                      target) != report.saddles_within_noise.end();
  const bool only_half = report.dominance.best_response_rows == std::vector<std::size_t>{0};
  const bool cell_ok = std::abs(cell - 3.8e-4) <= 2.7e-4;
  return {cell_ok && noisy_saddle && only_half,
          "P_e(0.5,0.5) = " + fmt(cell) + " (target 3.8e-4 +- 2.7e-4); (0.5,0.5) saddle within 3 SE: " +
              (noisy_saddle ? "yes" : "no") + "; exact saddle: " + (exact_saddle ? "yes" : "no") +
              "; row 0.5 sole best response within 3 SE: " + (only_half ? "yes" : "no")};
}

Outcome table_fixed8() {
  const auto report = run_equilibrium(table_config("fixed:8", workdir("fixed8")));
  const bool no_saddle = report.saddles.empty();

  const auto printed = testdata::fixed8_m4();
  const auto eq = solve_mixed(printed);
  const auto p = eq.row_strategy(6);
  const auto q = eq.col_strategy(6);
  auto support = [](const std::vector<double>& w) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] > 1e-9) s.push_back(i);
    }
    return s;
  };
  const bool supports_ok = support(p) == std::vector<std::size_t>{0, 5} &&
                           support(q) == std::vector<std::size_t>{3, 4};
  const bool weights_ok = std::abs(p[0] - 0.179) <= 0.02 && std::abs(p[5] - 0.821) <= 0.02 &&
                          std::abs(q[3] - 0.844) <= 0.02 && std::abs(q[4] - 0.156) <= 0.02;
  const bool value_ok = std::abs(eq.value - 3.8e-4) <= 0.1 * 3.8e-4;

  std::ostringstream detail;
  detail << "estimated matrix pure saddles: " << report.saddles.size()
         << "; printed matrix p = (" << fmt(p[0]) << " on 0.5, " << fmt(p[5]) << " on 1.0), q = ("
         << fmt(q[3]) << " on 0.8, " << fmt(q[4]) << " on 0.9), supports " << (supports_ok ? "ok" : "wrong")
         << ", weights " << (weights_ok ? "ok" : "off") << ", value " << fmt(eq.value)
         << " (target 3.8e-4 +- 10%: " << (value_ok ? "ok" : "off") << ")";
  return {no_saddle && supports_ok && weights_ok && value_ok, detail.str()};
}

Outcome blinding() {
  oracle::ExactScenario sc;
  sc.n = 4;
  sc.m = 1;
  sc.eps = 0.1;
  sc.pmal_b = 1.0;
  sc.pmal_fc = 1.0;
  sc.true_model = UnconstrainedMaxEntropy{};
  sc.fc_model = UnconstrainedMaxEntropy{};
  const double pe = oracle::exact_error_probability(sc, ErrorMetric::kPerComponent);
  const double gap = std::abs(pe - 0.5);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "P_e = %.17g, |P_e - 0.5| = %.3g", pe, gap);
  return {gap <= 2 * DBL_EPSILON, buf};
}

Outcome comparison_row() {
  const auto report = run_compare(table_config("independent:0.3", workdir("compare")));
  const double maj = report.columns.at(0).pe;
  const double opt = report.columns.at(1).pe;
  const bool ok = std::abs(maj - 0.073) <= 0.004 && std::abs(opt - 0.035) <= 0.003;
  return {ok, "Maj = " + fmt(maj) + " (target 0.073 +- 0.004), OPT = " + fmt(opt) + " (target 0.035 +- 0.003)"};
}

Outcome solver_properties() {
  std::mt19937_64 gen(1010);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_gap = 0.0;
  double worst_support = 0.0;
  int saddles = 0;
  int saddle_mismatch = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int rows = dim(gen);
    const int cols = dim(gen);
    Eigen::MatrixXd a(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) a(i, j) = u(gen);
    }
    const auto eq = solve_mixed(a);
    const auto p = eq.row_strategy(static_cast<std::size_t>(rows));
    const auto q = eq.col_strategy(static_cast<std::size_t>(cols));
    const auto bounds = value_bounds(a, p, q);
    worst_gap = std::max(worst_gap, bounds.upper - bounds.lower);
    const Eigen::VectorXd row_payoff = a * Eigen::Map<const Eigen::VectorXd>(q.data(), cols);
    const Eigen::RowVectorXd col_payoff = Eigen::Map<const Eigen::RowVectorXd>(p.data(), rows) * a;
    for (int i = 0; i < rows; ++i) {
      if (p[static_cast<std::size_t>(i)] > 0.0) worst_support = std::max(worst_support, std::abs(row_payoff(i) - eq.value));
    }
    for (int j = 0; j < cols; ++j) {
      if (q[static_cast<std::size_t>(j)] > 0.0) worst_support = std::max(worst_support, std::abs(col_payoff(j) - eq.value));
    }
    const auto pure = find_pure_equilibria(a);
    if (!pure.empty()) {
      ++saddles;
      if (eq.value != a(static_cast<Eigen::Index>(pure[0].row), static_cast<Eigen::Index>(pure[0].col))) ++saddle_mismatch;
    }
  }
  const bool ok = worst_gap <= 1e-9 && worst_support <= 1e-9 && saddle_mismatch == 0;
  return {ok, "max duality gap " + fmt(worst_gap) + ", max support payoff deviation " + fmt(worst_support) +
                  ", saddle value mismatches " + std::to_string(saddle_mismatch) + "/" + std::to_string(saddles)};
}

Outcome determinism(const fs::path& first_run) {
  const auto second = workdir("determinism_t1");
  const auto fourth = workdir("determinism_t4");
  auto config = table_config("independent:0.3", second);
  run_payoff(config);
  config.output_dir = fourth;
  config.threads = 4;
  run_payoff(config);
  const auto reference = slurp(first_run / "payoff.csv");
  const bool same_run = slurp(second / "payoff.csv") == reference;
  const bool same_threads = slurp(fourth / "payoff.csv") == reference;
  return {!reference.empty() && same_run && same_threads,
          std::string("repeat run identical: ") + (same_run ? "yes" : "no") +
              "; 4 threads identical: " + (same_threads ? "yes" : "no")};
}

Outcome spot_check_m10() {
  auto config = parse_config(
      "n = 20\nm = 10\neps = 0.1\ntrue_model = fixed:6\ntrials = 20000\nseed = 1\n"
      "grid_b = 0.5\ngrid_fc = 0.5\n");
  config.output_dir = workdir("fixed6_m10");
  const auto pm = run_payoff(config);
  const double cell = pm.pe(0, 0);
  return {std::abs(cell - 1.22e-4) <= 1.5e-4,
          "P_e(0.5,0.5) = " + fmt(cell) + " +- " + fmt(pm.std_err(0, 0)) + " SE (target 1.22e-4 +- 1.5e-4)"};
}

}  // namespace

int main(int argc, char** argv) {
  const bool slow = argc > 1 && std::string_view(argv[1]) == "--slow";
  if (slow) {
    run(12, "m=10 spot check, six Byzantines, cell (0.5,0.5)", spot_check_m10);
    return failures == 0 ? 0 : 1;
  }

  const auto independent_run = workdir("independent");
  run(1, "subset-sum recursion matches naive enumeration", dp_correctness);
  run(2, "subset-sum interior evaluations within k(n-k+1)", dp_complexity);
  run(3, "fusion equals exhaustive MAP on every report matrix", oracle_equivalence);
  run(4, "factorized independent score equals placement enumeration", factorization_identity);
  run(5, "independent nodes alpha=0.3, m=4 payoff matrix", [&] { return table_independent(independent_run); });
  run(6, "six Byzantines, m=4 pure equilibrium", table_fixed6);
  run(7, "eight Byzantines, m=4 mixed equilibrium", table_fixed8);
  run(8, "blinded network forces guessing", blinding);
  run(9, "majority vs optimum fusion, alpha=0.3, m=4", comparison_row);
  run(10, "zero-sum solver duality and support consistency", solver_properties);
  run(11, "byte-identical payoff CSV across runs and thread counts", [&] { return determinism(independent_run); });
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

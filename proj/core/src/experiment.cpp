#include "byzfuse/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <system_error>

namespace byzfuse {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("invalid value for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return value;
}

StrategyGrid parse_grid(std::string_view key, std::string_view text) {
  std::vector<double> values;
  while (true) {
    const auto comma = text.find(',');
    values.push_back(parse_number<double>(key, trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  try {
    return StrategyGrid(std::move(values));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

std::string grid_to_string(const StrategyGrid& grid) {
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) out += ',';
    out += format_number(grid[i]);
  }
  return out;
}

std::string header_lines(const ExperimentConfig& config) {
  return "config_hash=" + config.hash() + "\nseed=" + std::to_string(config.seed) +
         "\ntrials=" + std::to_string(config.trials) + "\nmetric=" + to_string(config.metric);
}

std::string markdown_stamp(const ExperimentConfig& config) {
  return "config hash `" + config.hash() + "`, seed " + std::to_string(config.seed) + ", " +
         std::to_string(config.trials) + " trials, " + to_string(config.metric) + " error\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string profile_label(const PayoffMatrix& pm, const PureProfile& p) {
  return "(" + format_number(pm.grid_b[p.row]) + ", " + format_number(pm.grid_fc[p.col]) + ")";
}

std::string support_label(const StrategyGrid& grid, const std::vector<double>& weights) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 1e-9) continue;
    if (!first) out += ", ";
    out += format_number(grid[i]);
    first = false;
  }
  return out + "}";
}

void write_strategy_row(std::ostringstream& os, const char* label, const StrategyGrid& grid,
                        const std::vector<double>& weights) {
  os << "| " << label << " |";
  for (std::size_t i = 0; i < grid.size(); ++i) os << ' ' << format_number(grid[i]) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < grid.size(); ++i) os << "---|";
  os << "\n| P |";
  for (double w : weights) os << ' ' << format_number(std::abs(w) < 1e-12 ? 0.0 : w) << " |";
  os << "\n\n";
}

struct MatrixSource {
  PayoffMatrix selected;
  std::optional<PayoffEstimate> estimate;
};

MatrixSource obtain_matrix(const ExperimentConfig& config) {
  MatrixSource source;
  if (config.payoff_input) {
    try {
      source.selected = payoff_from_csv(read_file(*config.payoff_input));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(config.payoff_input->string() + ": " + e.what());
    }
    source.selected.seed = config.seed;
    source.selected.metric = config.metric;
    return source;
  }
  source.estimate = estimate_payoff_matrix(config.scenario(), config.grid_b, config.grid_fc,
                                           config.trials, config.seed, config.threads);
  source.selected = source.estimate->select(config.metric);
  return source;
}

void ensure_output_dir(const ExperimentConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + config.output_dir.string() +
                             ": " + ec.message());
  }
}

void write_payoff_files(const ExperimentConfig& config, const MatrixSource& source) {
  const auto& pm = source.selected;
  const std::string header = header_lines(config);
  write_file_atomic(config.output_dir / "payoff.csv", to_csv(pm, header));

  std::ostringstream md;
  md << "# Payoff matrix\n\n" << markdown_stamp(config) << '\n';
  md << "Rows are P_mal^B, columns are P_mal^FC.\n\n" << to_markdown(pm) << '\n';
  if (pm.std_err.size() > 0 && pm.std_err.maxCoeff() > 0.0) {
    PayoffMatrix se = pm;
    se.pe = pm.std_err;
    md << "## Standard errors\n\n" << to_markdown(se);
  }
  write_file_atomic(config.output_dir / "payoff.md", md.str());

  std::ostringstream meta;
  meta << "config_hash=" << config.hash() << '\n';
  meta << "seed=" << config.seed << '\n';
  meta << "trials=" << config.trials << '\n';
  meta << "metric=" << to_string(config.metric) << '\n';
  meta << "source=" << (config.payoff_input ? "file" : "simulation") << '\n';
  meta << "\n[config]\n" << config.canonical();
  meta << "\n[standard_errors]\n" << std_err_to_csv(pm);
  if (source.estimate) {
    const auto other = config.metric == ErrorMetric::kPerComponent ? ErrorMetric::kPerSequence
                                                                   : ErrorMetric::kPerComponent;
    meta << "\n[" << to_string(other) << "]\n" << to_csv(source.estimate->select(other));
  }
  write_file_atomic(config.output_dir / "meta.txt", meta.str());
}

}  // namespace

Scenario ExperimentConfig::scenario() const {
  Scenario s;
  s.n = n;
  s.m = m;
  s.eps = eps;
  s.true_model = true_model;
  s.fc_model = fc();
  return s;
}

void ExperimentConfig::validate() const {
  try {
    scenario().validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (m > kMaxEnumeratedComponents) {
    throw ConfigError("m=" + std::to_string(m) + " exceeds the limit of " +
                      std::to_string(kMaxEnumeratedComponents));
  }
  if (trials < 1) throw ConfigError("trials must be positive");
  if (threads < 1) throw ConfigError("threads must be positive");
  for (const auto* grid : {&grid_b, &grid_fc}) {
    for (double v : grid->values()) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("grid values must lie in [0,1]");
    }
  }
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  out += "n=" + std::to_string(n) + '\n';
  out += "m=" + std::to_string(m) + '\n';
  out += "eps=" + format_number(eps) + '\n';
  out += "true_model=" + to_string(true_model) + '\n';
  out += "fc_model=" + to_string(fc()) + '\n';
  out += "grid_b=" + grid_to_string(grid_b) + '\n';
  out += "grid_fc=" + grid_to_string(grid_fc) + '\n';
  out += "trials=" + std::to_string(trials) + '\n';
  out += "seed=" + std::to_string(seed) + '\n';
  out += "error_metric=" + to_string(metric) + '\n';
  if (payoff_input) out += "payoff_input=" + payoff_input->generic_string() + '\n';
  return out;
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.emplace(std::string(key), line_no).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }

    try {
      if (key == "n") {
        config.n = parse_number<int>(key, value);
      } else if (key == "m") {
        config.m = parse_number<int>(key, value);
      } else if (key == "eps") {
        config.eps = parse_number<double>(key, value);
      } else if (key == "true_model") {
        config.true_model = parse_model(value);
      } else if (key == "fc_model") {
        config.fc_model = parse_model(value);
      } else if (key == "grid_b") {
        config.grid_b = parse_grid(key, value);
      } else if (key == "grid_fc") {
        config.grid_fc = parse_grid(key, value);
      } else if (key == "trials") {
        config.trials = parse_number<std::int64_t>(key, value);
      } else if (key == "seed") {
        config.seed = parse_number<std::uint64_t>(key, value);
      } else if (key == "error_metric") {
        config.metric = parse_metric(value);
      } else if (key == "output_dir") {
        config.output_dir = std::string(value);
      } else if (key == "threads") {
        config.threads = parse_number<int>(key, value);
      } else if (key == "payoff_input") {
        config.payoff_input = std::string(value);
      } else {
        throw ConfigError("unknown key '" + std::string(key) + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename into " + path.string());
  }
}

PayoffMatrix run_payoff(const ExperimentConfig& config) {
  config.validate();
  ensure_output_dir(config);
  const auto source = obtain_matrix(config);
  write_payoff_files(config, source);
  return source.selected;
}

EquilibriumReport run_equilibrium(const ExperimentConfig& config) {
  config.validate();
  ensure_output_dir(config);
  const auto source = obtain_matrix(config);
  if (source.estimate) write_payoff_files(config, source);

  EquilibriumReport report;
  report.matrix = source.selected;
  const auto& pm = report.matrix;
  report.strict_dominant = find_dominant_row(pm.pe);
  report.weak_dominant = find_weakly_dominant_row(pm.pe);
  report.dominance = assess_dominance(pm);
  report.saddles = find_pure_equilibria(pm.pe);
  report.saddles_within_noise = find_pure_equilibria(pm, 3.0);
  report.equilibrium = solve_mixed(pm.pe);

  auto row_label = [&](std::optional<std::size_t> row) {
    return row ? "P_mal^B = " + format_number(pm.grid_b[*row]) : std::string("none");
  };

  std::ostringstream md;
  md << "# Equilibrium\n\n" << markdown_stamp(config) << '\n';
  md << "## Dominance\n\n";
  md << "- strictly dominant row: " << row_label(report.strict_dominant) << '\n';
  md << "- weakly dominant row: " << row_label(report.weak_dominant) << '\n';
  md << "- strictly dominant beyond 3 standard errors: " << row_label(report.dominance.strict_row) << '\n';
  md << "- rows within 3 standard errors of the best response in every column:";
  if (report.dominance.best_response_rows.empty()) md << " none";
  for (auto r : report.dominance.best_response_rows) md << ' ' << format_number(pm.grid_b[r]);
  md << "\n- best response per column:";
  for (std::size_t c = 0; c < pm.grid_fc.size(); ++c) {
    md << ' ' << format_number(pm.grid_fc[c]) << "->"
       << format_number(pm.grid_b[report.dominance.column_best_response[c]]);
  }
  md << "\n\n## Pure equilibria\n\n";
  if (report.saddles.empty()) {
    md << "- no pure equilibrium\n";
  } else {
    for (const auto& p : report.saddles) {
      md << "- saddle point " << profile_label(pm, p) << ", P_e = "
         << format_number(pm.pe(static_cast<Eigen::Index>(p.row), static_cast<Eigen::Index>(p.col))) << '\n';
    }
  }
  md << "- saddle points within 3 standard errors:";
  if (report.saddles_within_noise.empty()) md << " none";
  for (const auto& p : report.saddles_within_noise) md << ' ' << profile_label(pm, p);
  md << "\n\n## Mixed equilibrium\n\n";
  const auto p = report.equilibrium.row_strategy(pm.grid_b.size());
  const auto q = report.equilibrium.col_strategy(pm.grid_fc.size());
  write_strategy_row(md, "P_mal^B", pm.grid_b, p);
  write_strategy_row(md, "P_mal^FC", pm.grid_fc, q);
  md << "- supports: " << support_label(pm.grid_b, p) << " x " << support_label(pm.grid_fc, q) << '\n';
  md << "- P_e* = " << format_number(report.equilibrium.value) << '\n';
  write_file_atomic(config.output_dir / "equilibrium.md", md.str());
  return report;
}

CompareReport run_compare(const ExperimentConfig& config) {
  config.validate();
  ensure_output_dir(config);
  const auto source = obtain_matrix(config);
  const auto eq = solve_mixed(source.selected.pe);

  // Majority fusion sees the realizations of the P_mal^B = 1 row.
  const auto row = config.grid_b.index_of(1.0).value_or(config.grid_b.size());
  const auto maj = estimate_majority_error(config.scenario(), 1.0, config.trials,
                                           row_seed(config.seed, row), config.threads);

  CompareReport report;
  report.columns.push_back({"Maj", maj.value(config.metric), "P_mal^B = 1"});
  report.columns.push_back({"OPT", eq.value,
                            eq.is_pure() ? "pure equilibrium" : "mixed equilibrium, p^T PE q"});

  std::ostringstream md;
  md << "# Comparison\n\n" << markdown_stamp(config) << '\n';
  md << "| setup |";
  for (const auto& c : report.columns) md << ' ' << c.scheme << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < report.columns.size(); ++i) md << "---|";
  md << "\n| " << to_string(config.true_model) << ", m = " << config.m << " |";
  for (const auto& c : report.columns) md << ' ' << format_number(c.pe) << " |";
  md << "\n\n";
  for (const auto& c : report.columns) md << "- " << c.scheme << ": " << c.note << '\n';
  write_file_atomic(config.output_dir / "compare.md", md.str());
  return report;
}

oracle::FusionCheckResult run_oracle_check(const ExperimentConfig& config) {
  ensure_output_dir(config);
  const auto result = oracle::check_fusion_grid();
  std::ostringstream md;
  md << "# Oracle check\n\n" << markdown_stamp(config) << '\n';
  md << "- scenarios: " << result.scenarios << '\n';
  md << "- report matrices: " << result.matrices << '\n';
  md << "- mismatches: " << result.mismatches << '\n';
  for (const auto& f : result.failures) md << "  - " << f << '\n';
  write_file_atomic(config.output_dir / "oracle_check.md", md.str());
  if (result.mismatches > 0) {
    throw std::runtime_error("fusion disagrees with the exhaustive oracle on " +
                             std::to_string(result.mismatches) + " report matrices");
  }
  return result;
}

}  // namespace byzfuse

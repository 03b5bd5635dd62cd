#include "byzfuse/model.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace byzfuse {

namespace {

void check_bits(std::span<const std::uint8_t> bits, const char* what) {
  for (auto b : bits) {
    if (b > 1) throw std::invalid_argument(std::string(what) + ": entries must be 0 or 1");
  }
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

StateSequence::StateSequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  check_bits(bits_, "StateSequence");
}

StateSequence StateSequence::FromCode(std::uint64_t code, int m) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    bits[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((code >> (m - 1 - j)) & 1U);
  }
  return StateSequence(std::move(bits));
}

std::uint64_t StateSequence::code() const {
  std::uint64_t code = 0;
  for (auto b : bits_) code = (code << 1) | b;
  return code;
}

StateSequence StateSequence::complement() const {
  std::vector<std::uint8_t> bits(bits_);
  for (auto& b : bits) b ^= 1U;
  return StateSequence(std::move(bits));
}

NodePlacement::NodePlacement(std::vector<std::uint8_t> flags) : flags_(std::move(flags)) {
  check_bits(flags_, "NodePlacement");
}

int NodePlacement::byzantine_count() const {
  return std::accumulate(flags_.begin(), flags_.end(), 0);
}

ReportMatrix::ReportMatrix(int n, int m)
    : n_(n), m_(m), entries_(static_cast<std::size_t>(n) * static_cast<std::size_t>(m), 0) {
  if (n < 0 || m < 0) throw std::invalid_argument("ReportMatrix: negative dimension");
}

ReportMatrix::ReportMatrix(int n, int m, std::vector<std::uint8_t> entries)
    : n_(n), m_(m), entries_(std::move(entries)) {
  if (n < 0 || m < 0) throw std::invalid_argument("ReportMatrix: negative dimension");
  if (entries_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m)) {
    throw std::invalid_argument("ReportMatrix: entry count does not match n*m");
  }
  check_bits(entries_, "ReportMatrix");
}

ReportMatrix ReportMatrix::FromPackedRows(std::span<const std::uint32_t> rows, int m) {
  ReportMatrix r(static_cast<int>(rows.size()), m);
  for (int i = 0; i < r.n_; ++i) {
    for (int j = 0; j < m; ++j) {
      r.set(i, j, static_cast<std::uint8_t>((rows[static_cast<std::size_t>(i)] >> (m - 1 - j)) & 1U));
    }
  }
  return r;
}

std::vector<std::uint32_t> ReportMatrix::packed_rows() const {
  if (m_ > 32) throw std::length_error("ReportMatrix::packed_rows: more than 32 components");
  std::vector<std::uint32_t> rows(static_cast<std::size_t>(n_), 0);
  for (int i = 0; i < n_; ++i) {
    std::uint32_t row = 0;
    for (int j = 0; j < m_; ++j) row = (row << 1) | (*this)(i, j);
    rows[static_cast<std::size_t>(i)] = row;
  }
  return rows;
}

ReportMatrix ReportMatrix::complement() const {
  ReportMatrix out(*this);
  for (auto& e : out.entries_) e ^= 1U;
  return out;
}

void ChannelParams::validate() const {
  if (!is_probability(eps)) throw std::invalid_argument("eps must lie in [0,1]");
  if (!is_probability(pmal)) throw std::invalid_argument("pmal must lie in [0,1]");
}

Probability crossover_delta(const ChannelParams& params) {
  params.validate();
  return params.eps * (1.0 - params.pmal) + (1.0 - params.eps) * params.pmal;
}

void validate_model(const ByzantineModel& model, int n) {
  if (n < 1) throw std::invalid_argument("network must have at least one node");
  if (const auto* ind = std::get_if<IndependentAlpha>(&model)) {
    if (!is_probability(ind->alpha)) throw std::invalid_argument("alpha must lie in [0,1]");
  } else if (const auto* fixed = std::get_if<FixedCount>(&model)) {
    if (fixed->n_b < 0 || fixed->n_b > n) {
      throw std::invalid_argument("fixed Byzantine count must lie in [0, n]");
    }
  }
}

int max_byzantine_count(const BoundedBelowHalf& model, int n) {
  return model.include_half ? n / 2 : (n + 1) / 2 - 1;
}

std::string to_string(const ByzantineModel& model) {
  struct Visitor {
    std::string operator()(const UnconstrainedMaxEntropy&) const { return "max-entropy"; }
    std::string operator()(const IndependentAlpha& m) const {
      std::ostringstream os;
      os.imbue(std::locale::classic());
      os << "independent:" << m.alpha;
      return os.str();
    }
    std::string operator()(const BoundedBelowHalf& m) const {
      return m.include_half ? "bounded-half:inclusive" : "bounded-half";
    }
    std::string operator()(const FixedCount& m) const {
      return "fixed:" + std::to_string(m.n_b);
    }
  };
  return std::visit(Visitor{}, model);
}

ByzantineModel parse_model(std::string_view text) {
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const bool has_arg = colon != std::string_view::npos;

  if (head == "max-entropy" && !has_arg) return UnconstrainedMaxEntropy{};
  if (head == "independent" && has_arg) return IndependentAlpha{parse_double(arg)};
  if (head == "bounded-half") {
    if (!has_arg) return BoundedBelowHalf{};
    if (arg == "inclusive") return BoundedBelowHalf{true};
  }
  if (head == "fixed" && has_arg) return FixedCount{parse_int(arg)};
  throw std::invalid_argument("unknown Byzantine model '" + std::string(text) +
                              "' (expected max-entropy, independent:<alpha>, "
                              "bounded-half[:inclusive] or fixed:<n_b>)");
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  // Rejection on the largest multiple of bound keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

StateSequence sample_states(RandomStream& rng, int m) {
  if (m < 1) throw std::invalid_argument("sample_states: m must be at least 1");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(m));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next() >> 63);
  return StateSequence(std::move(bits));
}

NodePlacement sample_placement(RandomStream& rng, const ByzantineModel& model, int n) {
  validate_model(model, n);
  std::vector<std::uint8_t> flags(static_cast<std::size_t>(n), 0);

  auto fill_bernoulli = [&](double p) {
    for (auto& f : flags) f = rng.bernoulli(p) ? 1 : 0;
  };

  if (std::holds_alternative<UnconstrainedMaxEntropy>(model)) {
    for (auto& f : flags) f = static_cast<std::uint8_t>(rng.next() >> 63);
  } else if (const auto* ind = std::get_if<IndependentAlpha>(&model)) {
    fill_bernoulli(ind->alpha);
  } else if (const auto* bounded = std::get_if<BoundedBelowHalf>(&model)) {
    const int limit = max_byzantine_count(*bounded, n);
    int count = 0;
    do {
      count = 0;
      for (auto& f : flags) {
        f = static_cast<std::uint8_t>(rng.next() >> 63);
        count += f;
      }
    } while (count > limit);
  } else {
    const int n_b = std::get<FixedCount>(model).n_b;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    // Partial Fisher-Yates: the first n_b slots are a uniform n_b-subset.
    for (int i = 0; i < n_b; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(order[static_cast<std::size_t>(i)], order[j]);
      flags[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    }
  }
  return NodePlacement(std::move(flags));
}

ReportMatrix sample_reports(RandomStream& rng, const StateSequence& s, const NodePlacement& a,
                            Probability eps, Probability pmal_b) {
  const int n = a.size();
  const int m = s.size();
  ReportMatrix r(n, m);
  for (int i = 0; i < n; ++i) {
    const bool byzantine = a[i] != 0;
    for (int j = 0; j < m; ++j) {
      std::uint8_t u = s[j] ^ (rng.bernoulli(eps) ? 1 : 0);
      if (byzantine && rng.bernoulli(pmal_b)) u ^= 1U;
      r.set(i, j, u);
    }
  }
  return r;
}

}  // namespace byzfuse

#pragma once

// Domain types and the generative pipeline of the parallel fusion model:
// system states -> local decisions -> (possibly flipped) reports.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace byzfuse {

using Probability = double;

// Binary state sequence s_1..s_m. Packed encodings put s_1 in the most
// significant bit so that ascending integer order is lexicographic order.
class StateSequence {
 public:
  StateSequence() = default;
  explicit StateSequence(std::vector<std::uint8_t> bits);

  // Decodes the m-bit integer `code` (s_1 = bit m-1).
  static StateSequence FromCode(std::uint64_t code, int m);

  int size() const { return static_cast<int>(bits_.size()); }
  std::uint8_t operator[](int j) const { return bits_[static_cast<std::size_t>(j)]; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  // Requires size() <= 64.
  std::uint64_t code() const;
  StateSequence complement() const;

  friend bool operator==(const StateSequence&, const StateSequence&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Byzantine flags a_1..a_n (1 = Byzantine).
class NodePlacement {
 public:
  NodePlacement() = default;
  explicit NodePlacement(std::vector<std::uint8_t> flags);

  int size() const { return static_cast<int>(flags_.size()); }
  std::uint8_t operator[](int i) const { return flags_[static_cast<std::size_t>(i)]; }
  std::span<const std::uint8_t> flags() const { return flags_; }
  int byzantine_count() const;

  friend bool operator==(const NodePlacement&, const NodePlacement&) = default;

 private:
  std::vector<std::uint8_t> flags_;
};

// n x m binary report matrix, row-major. Row i holds the reports of node i.
class ReportMatrix {
 public:
  ReportMatrix() = default;
  ReportMatrix(int n, int m);
  ReportMatrix(int n, int m, std::vector<std::uint8_t> entries);

  // Builds a matrix from per-node packed rows (same bit order as
  // StateSequence::code()).
  static ReportMatrix FromPackedRows(std::span<const std::uint32_t> rows, int m);

  int nodes() const { return n_; }
  int components() const { return m_; }

  std::uint8_t operator()(int i, int j) const { return entries_[index(i, j)]; }
  void set(int i, int j, std::uint8_t v) { entries_[index(i, j)] = v; }

  // Requires components() <= 32.
  std::vector<std::uint32_t> packed_rows() const;
  ReportMatrix complement() const;

  friend bool operator==(const ReportMatrix&, const ReportMatrix&) = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(m_) +
           static_cast<std::size_t>(j);
  }

  int n_ = 0;
  int m_ = 0;
  std::vector<std::uint8_t> entries_;
};

// Local decision error eps and flipping probability pmal.
struct ChannelParams {
  Probability eps = 0.1;
  Probability pmal = 1.0;

  // Throws std::invalid_argument outside [0,1].
  void validate() const;
};

// Probability that a Byzantine report disagrees with the true state.
// Throws std::invalid_argument like ChannelParams::validate.
Probability crossover_delta(const ChannelParams& params);

// Byzantine placement distributions. UnconstrainedMaxEntropy makes every
// placement equiprobable; IndependentAlpha draws i.i.d. Bernoulli(alpha)
// flags; BoundedBelowHalf is uniform over placements with fewer than n/2
// Byzantines (or at most floor(n/2) when include_half is set); FixedCount
// is uniform over placements with exactly n_b Byzantines.
struct UnconstrainedMaxEntropy {
  friend bool operator==(const UnconstrainedMaxEntropy&,
                         const UnconstrainedMaxEntropy&) = default;
};
struct IndependentAlpha {
  double alpha = 0.3;
  friend bool operator==(const IndependentAlpha&, const IndependentAlpha&) = default;
};
struct BoundedBelowHalf {
  bool include_half = false;
  friend bool operator==(const BoundedBelowHalf&, const BoundedBelowHalf&) = default;
};
struct FixedCount {
  int n_b = 0;
  friend bool operator==(const FixedCount&, const FixedCount&) = default;
};

using ByzantineModel =
    std::variant<UnconstrainedMaxEntropy, IndependentAlpha, BoundedBelowHalf, FixedCount>;

// Throws std::invalid_argument if `model` is not valid for a network of n nodes.
void validate_model(const ByzantineModel& model, int n);

// Largest admissible Byzantine count under BoundedBelowHalf.
int max_byzantine_count(const BoundedBelowHalf& model, int n);

// Textual form used by configuration files: "max-entropy", "independent:0.3",
// "bounded-half", "bounded-half:inclusive", "fixed:6".
std::string to_string(const ByzantineModel& model);
ByzantineModel parse_model(std::string_view text);

// Seeded 64-bit random stream. Every sampler draws from an explicit stream so
// that a trial is a pure function of its seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Exact for p = 0 and p = 1.
  bool bernoulli(double p) { return uniform() < p; }
  // Uniform on [0, bound). bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer over (base, index); used for row and trial streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

StateSequence sample_states(RandomStream& rng, int m);
NodePlacement sample_placement(RandomStream& rng, const ByzantineModel& model, int n);
ReportMatrix sample_reports(RandomStream& rng, const StateSequence& s,
                            const NodePlacement& a, Probability eps, Probability pmal_b);

}  // namespace byzfuse

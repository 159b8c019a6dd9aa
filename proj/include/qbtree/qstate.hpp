#ifndef QBTREE_QSTATE_HPP
#define QBTREE_QSTATE_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "qbtree/core.hpp"
#include "qbtree/metrics.hpp"
#include "qbtree/node.hpp"

namespace qbtree
{
class Qram;
class QramBank;

using Weight = std::uint64_t;

/*######################################################################################
 * Exact rationals
 *####################################################################################*/

/// Non-negative rational kept in lowest terms.
class Rational
{
 public:
  constexpr Rational() = default;
  Rational(std::uint64_t num, std::uint64_t den);

  [[nodiscard]] constexpr std::uint64_t num() const noexcept { return num_; }
  [[nodiscard]] constexpr std::uint64_t den() const noexcept { return den_; }
  [[nodiscard]] double to_double() const noexcept
  {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  bool operator==(const Rational &) const = default;
  std::strong_ordering operator<=>(const Rational &rhs) const noexcept;

 private:
  std::uint64_t num_{0};
  std::uint64_t den_{1};
};

/*######################################################################################
 * Seeded randomness
 *####################################################################################*/

class Rng
{
 public:
  explicit Rng(std::uint64_t seed) : engine_{seed} {}

  /// Uniform draw from [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Independent stream derived from a master seed, e.g. one per query index.
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

  std::mt19937_64 &engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/*######################################################################################
 * Weighted states
 *####################################################################################*/

/**
 * @brief An exact superposition with non-negative real amplitudes.
 *
 * Each basis label carries an integer weight; its amplitude is sqrt(weight / total).
 * Entries are sorted by label, unique, and never zero. Identical labels merge by
 * adding weights, which is sound only because no amplitude here is negative.
 *
 * @tparam Label a totally ordered basis label.
 */
template <class Label>
class WeightedState
{
 public:
  using Entry = std::pair<Label, Weight>;

  /// Sorts, merges equal labels and drops zero weights; throws EmptyState if nothing
  /// remains.
  static WeightedState from_entries(std::vector<Entry> entries)
  {
    const auto by_label = [](const Entry &a, const Entry &b) { return a.first < b.first; };
    if (!std::is_sorted(entries.begin(), entries.end(), by_label)) {
      std::sort(entries.begin(), entries.end(), by_label);
    }
    WeightedState s;
    s.entries_.reserve(entries.size());
    for (auto &e : entries) {
      const Weight w = e.second;
      if (w == 0) continue;
      if (!s.entries_.empty() && s.entries_.back().first == e.first) {
        s.entries_.back().second += w;
      } else {
        s.entries_.push_back(std::move(e));
      }
      s.total_ += w;
    }
    if (s.entries_.empty()) {
      throw Error{ErrorCode::kEmptyState, "superposition has no non-zero entry"};
    }
    return s;
  }

  [[nodiscard]] std::span<const Entry> entries() const noexcept { return entries_; }
  [[nodiscard]] Weight total() const noexcept { return total_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  [[nodiscard]] Weight weight_of(const Label &label) const
  {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), label,
                               [](const Entry &e, const Label &l) { return e.first < l; });
    return (it != entries_.end() && it->first == label) ? it->second : 0;
  }

  [[nodiscard]] Rational probability(const Label &label) const
  {
    return Rational{weight_of(label), total_};
  }

  /// All entries carry the same weight.
  [[nodiscard]] bool uniform() const noexcept
  {
    return std::all_of(entries_.begin(), entries_.end(),
                       [&](const Entry &e) { return e.second == entries_.front().second; });
  }

  [[nodiscard]] std::vector<Label> labels() const
  {
    std::vector<Label> out;
    out.reserve(entries_.size());
    for (const auto &e : entries_) out.push_back(e.first);
    return out;
  }

  bool operator==(const WeightedState &) const = default;

 private:
  WeightedState() = default;

  std::vector<Entry> entries_{};
  Weight total_{0};
};

/// The oracle-marked state: in_state holds the flagged branch, out_weight the rest.
template <class Label>
struct FlaggedState {
  std::optional<WeightedState<Label>> in_state{};
  Weight out_weight{};
  Weight total{};

  [[nodiscard]] Weight in_weight() const noexcept { return in_state ? in_state->total() : 0; }
};

/*######################################################################################
 * Initialisation, expansion, marking, measurement
 *####################################################################################*/

/// Equal weight 1 on every distinct label.
template <class Label>
WeightedState<Label> uniform_init(std::span<const Label> labels)
{
  if (labels.empty()) {
    throw Error{ErrorCode::kEmptySet, "uniform_init over an empty set"};
  }
  std::vector<Label> sorted{labels.begin(), labels.end()};
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<typename WeightedState<Label>::Entry> entries;
  entries.reserve(sorted.size());
  for (auto &l : sorted) entries.emplace_back(std::move(l), 1);
  return WeightedState<Label>::from_entries(std::move(entries));
}

/// Amplitude-encoded initial state; costs one classical access per item.
template <class Label>
WeightedState<Label> weighted_init(std::span<const std::pair<Label, Weight>> items,
                                   IoCounters &io)
{
  if (items.empty()) {
    throw Error{ErrorCode::kEmptySet, "weighted_init over an empty list"};
  }
  for (const auto &it : items) {
    if (it.second == 0) {
      throw Error{ErrorCode::kZeroWeight, "weighted_init item with zero weight"};
    }
  }
  io.classical_node_accesses += items.size();
  return WeightedState<Label>::from_entries({items.begin(), items.end()});
}

/// Hadamard fan-out over log2(B) fresh qubits. Charges no IO.
template <class Label>
WeightedState<std::pair<Label, std::uint32_t>> expand(const WeightedState<Label> &state,
                                                      std::uint32_t branching)
{
  std::vector<std::pair<std::pair<Label, std::uint32_t>, Weight>> out;
  out.reserve(state.size() * branching);
  for (const auto &[label, w] : state.entries()) {
    for (std::uint32_t j = 0; j < branching; ++j) out.push_back({{label, j}, w});
  }
  return WeightedState<std::pair<Label, std::uint32_t>>::from_entries(std::move(out));
}

/// Flags every entry satisfying `pred`. Charges no IO.
template <class Label, class Pred>
FlaggedState<Label> mark_if(const WeightedState<Label> &state, Pred &&pred)
{
  std::vector<typename WeightedState<Label>::Entry> in;
  Weight out_weight = 0;
  for (const auto &e : state.entries()) {
    if (pred(e.first)) {
      in.push_back(e);
    } else {
      out_weight += e.second;
    }
  }
  FlaggedState<Label> f;
  f.total = state.total();
  f.out_weight = out_weight;
  if (!in.empty()) f.in_state = WeightedState<Label>::from_entries(std::move(in));
  return f;
}

/// Range oracle: real pairs with lo <= key <= hi; dummies are always out.
FlaggedState<KeyRecordPair> mark_in_range(const WeightedState<KeyRecordPair> &state,
                                          const QueryRange &range);

template <class Label>
Rational success_probability(const FlaggedState<Label> &f)
{
  return Rational{f.in_weight(), f.total};
}

/// Expected number of post-selection rounds, total / in. Requires in > 0.
template <class Label>
Rational expected_attempts(const FlaggedState<Label> &f)
{
  if (f.in_weight() == 0) {
    throw Error{ErrorCode::kNoResults, "flagged branch is empty"};
  }
  return Rational{f.total, f.in_weight()};
}

/// Measures the flag qubit once. Success keeps the flagged branch unchanged.
template <class Label>
std::optional<WeightedState<Label>> post_select(const FlaggedState<Label> &f, Rng &rng,
                                                IoCounters &io)
{
  ++io.post_selection_attempts;
  if (f.in_weight() == 0) return std::nullopt;
  if (rng.below(f.total) < f.in_weight()) return f.in_state;
  return std::nullopt;
}

/// Collapses the state to one label with probability weight / total.
template <class Label>
Label measure_once(const WeightedState<Label> &state, Rng &rng)
{
  Weight draw = rng.below(state.total());
  for (const auto &[label, w] : state.entries()) {
    if (draw < w) return label;
    draw -= w;
  }
  return state.entries().back().first;
}

/*######################################################################################
 * QRAM-driven steps
 *####################################################################################*/

/// One Hadamard fan-out plus one hierarchy-QRAM load: every node becomes its B child
/// slots (a leaf maps to itself, a dummy slot to the dummy node). One QRAM load.
WeightedState<NodeRef> descend(const WeightedState<NodeRef> &state, const QramBank &hierarchy,
                               std::uint32_t branching, IoCounters &io);

/// Single-tree form of descend.
WeightedState<NodeId> descend(const WeightedState<NodeId> &state, const Qram &hierarchy,
                              std::uint32_t branching, IoCounters &io);

/// One Hadamard fan-out plus one data-QRAM load over leaf slots. Dummy slots become
/// KeyRecordPair::dummy(). One QRAM load.
WeightedState<KeyRecordPair> load_pairs(const WeightedState<NodeRef> &state,
                                        const QramBank &data, std::uint32_t branching,
                                        IoCounters &io);

WeightedState<KeyRecordPair> load_pairs(const WeightedState<NodeId> &state, const Qram &data,
                                        std::uint32_t branching, IoCounters &io);

}  // namespace qbtree

#endif  // QBTREE_QSTATE_HPP

#ifndef QBTREE_DYNAMIC_QBTREE_HPP
#define QBTREE_DYNAMIC_QBTREE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qbtree/core.hpp"
#include "qbtree/metrics.hpp"
#include "qbtree/quantum_btree.hpp"

namespace qbtree
{
/// T0: (key, rec) -> pair id. Charged as a B+ tree lookup, ceil(log_B n) + 1 accesses.
class PairIdIndex
{
 public:
  explicit PairIdIndex(TreeParams params) : params_{params} {}

  [[nodiscard]] std::optional<std::uint64_t> find(const KeyRecordPair &p, IoCounters &io) const;
  void insert(const KeyRecordPair &p, std::uint64_t id, IoCounters &io);
  void erase(const KeyRecordPair &p, IoCounters &io);

  /// Unmetered lookup for bookkeeping and audits.
  [[nodiscard]] std::optional<std::uint64_t> peek(const KeyRecordPair &p) const;
  [[nodiscard]] std::size_t size() const noexcept { return map_.size(); }
  [[nodiscard]] const std::map<KeyRecordPair, std::uint64_t> &entries() const noexcept
  {
    return map_;
  }

 private:
  [[nodiscard]] std::uint64_t cost() const;

  TreeParams params_;
  std::map<KeyRecordPair, std::uint64_t> map_{};
};

/// T1: pair id -> forest level, as coalesced intervals with range assignment. Charged
/// ceil(log2 intervals) + 1 accesses per call.
class IdLevelMap
{
 public:
  static constexpr int kBuffer = -1;

  void assign(std::uint64_t lo, std::uint64_t hi, int level, IoCounters &io);
  [[nodiscard]] std::optional<int> find(std::uint64_t id, IoCounters &io) const;

  [[nodiscard]] std::optional<int> peek(std::uint64_t id) const;
  [[nodiscard]] std::size_t interval_count() const noexcept { return map_.size(); }

 private:
  struct Span {
    std::uint64_t hi;
    int level;
  };

  [[nodiscard]] std::uint64_t cost() const;
  void split_at(std::uint64_t at);

  std::map<std::uint64_t, Span> map_{};
};

struct ForestReport {
  std::vector<std::string> violations{};

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/**
 * @brief Logarithmic-method collection of static quantum B+ trees.
 *
 * Inserts land in a sorted buffer of capacity B that flushes into level 0; level i
 * holds trees of height i and merges its B trees into one taller tree when full.
 * Deletes go through T0 and T1 to the owning tree, then repair in place.
 */
class DynamicQuantumBTree
{
 public:
  using Forest = std::vector<QuantumBPlusTree>;

  explicit DynamicQuantumBTree(TreeParams params);

  /// Throws DuplicatePair if the pair is live.
  void insert(const KeyRecordPair &p, IoCounters &io);

  /// Throws NotFound if the pair is not live.
  void erase(const KeyRecordPair &p, IoCounters &io);

  /// Empties the buffer into level 0 even when it is not full.
  void flush(IoCounters &io);

  /// Buffer scan, one global search per tree, then one local search across every
  /// candidate with weights B^{h(u)+1}. Buffer hits are reported in `classical`.
  [[nodiscard]] QueryResult query(const QueryRange &r, EvalMode mode, Rng *rng,
                                  IoCounters &io) const;

  /// The same forests read classically, as the dynamic baseline.
  [[nodiscard]] std::vector<KeyRecordPair> classical_query(const QueryRange &r,
                                                           IoCounters &io) const;

  [[nodiscard]] const TreeParams &params() const noexcept { return params_; }
  [[nodiscard]] std::uint64_t size() const noexcept { return t0_.size(); }
  [[nodiscard]] const std::vector<Forest> &forests() const noexcept { return forests_; }
  [[nodiscard]] const std::vector<KeyRecordPair> &buffer() const noexcept { return buffer_; }
  [[nodiscard]] const PairIdIndex &t0() const noexcept { return t0_; }
  [[nodiscard]] const IdLevelMap &t1() const noexcept { return t1_; }

  /// Forest sizes and heights, per-tree balance and mirrors, buffer bound, and the
  /// agreement of T0 and T1 with where each pair actually lives.
  [[nodiscard]] ForestReport check_invariants() const;

  /// For negative-control tests.
  std::vector<Forest> &mutable_forests() noexcept { return forests_; }

 private:
  Forest &level(std::size_t i);
  void place(QuantumBPlusTree tree, IoCounters &io);
  void normalize(IoCounters &io);
  void merge_level(std::size_t i, IoCounters &io);
  void repair_root(std::size_t i, std::size_t k, IoCounters &io);
  bool borrow_root_child(std::size_t i, std::size_t k, IoCounters &io);
  void relabel(const std::vector<KeyRecordPair> &pairs, int level, IoCounters &io);

  TreeParams params_;
  std::vector<KeyRecordPair> buffer_{};
  std::vector<Forest> forests_{};
  PairIdIndex t0_;
  IdLevelMap t1_{};
  std::vector<char> id_live_{};
};

}  // namespace qbtree

#endif  // QBTREE_DYNAMIC_QBTREE_HPP

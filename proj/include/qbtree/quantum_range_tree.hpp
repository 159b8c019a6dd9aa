#ifndef QBTREE_QUANTUM_RANGE_TREE_HPP
#define QBTREE_QUANTUM_RANGE_TREE_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qbtree/core.hpp"
#include "qbtree/metrics.hpp"
#include "qbtree/quantum_btree.hpp"

namespace qbtree
{
enum class CoverKind {
  /// Node fully inside the range; everything beneath it qualifies on this coordinate.
  kSubtree,
  /// Leaf straddling a range end; its pairs are read and filtered.
  kLeafScan,
};

struct CanonicalNode {
  NodeId node{};
  CoverKind kind{};

  auto operator<=>(const CanonicalNode &) const = default;
};

using CanonicalSet = std::vector<CanonicalNode>;

/// Maximal inside nodes plus straddling leaves, in key order. One access per node read.
CanonicalSet canonical_nodes(const WeightBalancedTree &t, const QueryRange &r, IoCounters &io);

/// One level of the recursion: a tree over coordinate `coord`, and for coord > 0 a
/// tree over coordinate coord-1 on every internal node, indexed by node id.
struct RangeTreeLevel {
  std::uint32_t coord{};
  QuantumBPlusTree tree;
  std::vector<std::unique_ptr<RangeTreeLevel>> secondary{};
};

/**
 * @brief Static d-dimensional quantum range tree.
 *
 * Pairs stored at every level are (coordinate value, point index). The top level
 * indexes the last coordinate; a 1-dimensional tree is a plain quantum B+ tree.
 */
class QuantumRangeTree
{
 public:
  /// Throws EmptyDataset, or DimensionMismatch when points disagree on d.
  static QuantumRangeTree build(std::vector<PointRecord> points, TreeParams params,
                                IoCounters &io);

  [[nodiscard]] std::size_t dims() const noexcept { return dims_; }
  [[nodiscard]] const TreeParams &params() const noexcept { return params_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] const std::vector<PointRecord> &points() const noexcept { return points_; }
  [[nodiscard]] const RangeTreeLevel &top() const noexcept { return *top_; }

  /// Canonical decomposition down to the 1-d trees, one global search per tree, then a
  /// weighted local search over all candidates plus the straddling-leaf hits. Labels
  /// are (first coordinate, point index).
  [[nodiscard]] QueryResult query(const BoxRange &box, EvalMode mode, Rng *rng,
                                  IoCounters &io) const;

  /// Points named by a query result, sorted.
  [[nodiscard]] std::vector<PointRecord> resolve(const QueryResult &res) const;

  /// Classical range tree answer over the same trees, reporting every point.
  [[nodiscard]] std::vector<PointRecord> classical_query(const BoxRange &box,
                                                         IoCounters &io) const;

  /// Each secondary holds exactly the pairs beneath its node; every tree is balanced
  /// and mirrored.
  [[nodiscard]] std::vector<std::string> audit() const;

 private:
  QuantumRangeTree() = default;

  std::unique_ptr<RangeTreeLevel> build_level(const std::vector<std::uint64_t> &idx,
                                              std::uint32_t coord, IoCounters &io) const;
  [[nodiscard]] KeyRecordPair label(std::uint64_t idx) const;

  TreeParams params_{};
  std::size_t dims_{};
  std::vector<PointRecord> points_{};
  std::unique_ptr<RangeTreeLevel> top_{};
};

}  // namespace qbtree

#endif  // QBTREE_QUANTUM_RANGE_TREE_HPP

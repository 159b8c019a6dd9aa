#ifndef QBTREE_CLASSICAL_BTREE_HPP
#define QBTREE_CLASSICAL_BTREE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbtree/core.hpp"
#include "qbtree/metrics.hpp"
#include "qbtree/node.hpp"

namespace qbtree
{
/**
 * @brief One node of a weight-balanced B+ tree.
 *
 * Only the non-dummy slots are stored; a slot index at or past fanout() is a dummy.
 * Internal nodes keep the routing bounds of each child next to the child id.
 */
struct BPlusNode {
  NodeId id{};
  std::uint32_t height{};
  std::vector<NodeId> children{};
  std::vector<RoutingKey> child_routing{};
  std::vector<KeyRecordPair> pairs{};
  std::uint64_t weight{};

  [[nodiscard]] bool is_leaf() const noexcept { return height == 0; }

  [[nodiscard]] std::size_t fanout() const noexcept
  {
    return is_leaf() ? pairs.size() : children.size();
  }

  /// Tight (L, U) over everything beneath; RoutingKey::dummy() when empty.
  [[nodiscard]] RoutingKey routing() const noexcept;
};

/// Nested description of a tree, for building fixtures whose shape is given.
struct LayoutNode {
  std::vector<LayoutNode> children{};
  std::vector<KeyRecordPair> pairs{};
};

struct NodeBalance {
  NodeId id{};
  std::uint32_t height{};
  std::uint64_t weight{};
  bool balanced{};
  bool perfectly_balanced{};
};

struct BalanceReport {
  std::vector<NodeBalance> nodes{};
  std::vector<std::string> violations{};
  bool all_balanced{true};
  bool all_perfectly_balanced{true};

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
  [[nodiscard]] const NodeBalance *find(NodeId id) const noexcept;
};

enum class RebalanceKind { kBorrow, kMerge, kRebuild, kTreeRebuild };

/// One repair step taken by erase(). For a borrow, `moved` is the child that changed
/// parents, or the dummy id when a single pair moved between leaves.
struct RebalanceAction {
  RebalanceKind kind{};
  std::uint32_t height{};
  NodeId receiver{};
  NodeId donor{};
  NodeId moved{};
};

struct EraseReport {
  std::vector<RebalanceAction> actions{};
  /// Internal root left with fewer than two children.
  bool root_underfull{};
};

/**
 * @brief Weight-balanced B+ tree with page-IO metering.
 *
 * Every non-root node of height h keeps B^{h+1}/4 <= weight <= B^{h+1}; all leaves sit
 * on one level. Node ids are reused after frees so that QRAM mirrors stay compact.
 */
class WeightBalancedTree
{
 public:
  /// Perfectly balanced tree of the smallest height that fits; charges one access per
  /// node written. Throws EmptyDataset.
  static WeightBalancedTree bulk_load(const Dataset &d, TreeParams params, IoCounters &io);
  static WeightBalancedTree bulk_load(std::span<const KeyRecordPair> sorted, TreeParams params,
                                      IoCounters &io);

  /// Same layout rule with the height fixed; the root gets at least two children when
  /// internal. Throws InvalidConfig if the pairs cannot fill that height.
  static WeightBalancedTree build_with_height(std::span<const KeyRecordPair> sorted,
                                              TreeParams params, std::uint32_t height,
                                              IoCounters &io);

  /// Tree with exactly the given shape, ids assigned breadth-first. Unmetered.
  static WeightBalancedTree from_layout(const LayoutNode &root, TreeParams params);

  /// An empty single-leaf tree.
  explicit WeightBalancedTree(TreeParams params);

  [[nodiscard]] const TreeParams &params() const noexcept { return params_; }
  [[nodiscard]] NodeId root() const noexcept { return root_; }
  [[nodiscard]] std::uint32_t height() const noexcept { return node(root_).height; }
  [[nodiscard]] std::uint64_t size() const noexcept { return node(root_).weight; }
  [[nodiscard]] const BPlusNode &node(NodeId id) const noexcept { return nodes_[id.value]; }
  [[nodiscard]] bool is_live(NodeId id) const noexcept
  {
    return id.value < live_.size() && live_[id.value] != 0;
  }
  [[nodiscard]] std::size_t node_count() const noexcept { return live_count_; }
  /// One past the largest id ever allocated.
  [[nodiscard]] std::uint64_t id_extent() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::vector<NodeId> live_nodes() const;

  /// B^{h+1}/4 and B^{h+1}.
  [[nodiscard]] std::uint64_t min_weight(std::uint32_t h) const { return params_.pow(h + 1) / 4; }
  [[nodiscard]] std::uint64_t capacity(std::uint32_t h) const { return params_.pow(h + 1); }

  /// Pairs beneath `id` in key order. Charges one read per node when `io` is given.
  [[nodiscard]] std::vector<KeyRecordPair> collect_pairs(NodeId id,
                                                         IoCounters *io = nullptr) const;
  [[nodiscard]] std::vector<KeyRecordPair> collect_pairs() const { return collect_pairs(root_); }

  /// Root-to-leaf path to the leaf holding `p`, charging one read per node visited.
  [[nodiscard]] std::optional<std::vector<NodeId>> find_path(const KeyRecordPair &p,
                                                             IoCounters &io) const;

  /// Removes `p` and repairs every imbalanced non-root node on its path: borrow from a
  /// sibling, else merge with it, else rebuild both. Throws NotFound.
  EraseReport erase(const KeyRecordPair &p, IoCounters &io);

  /// Rebuilds the whole tree perfectly balanced at the smallest fitting height.
  void rebuild_all(IoCounters &io);

  /// Makes the only child of an internal root the new root.
  void collapse_root(IoCounters &io);

  /// Copies the subtree of `src` rooted at `src_node` into this tree (unattached) and
  /// returns the copy's id.
  NodeId graft(const WeightBalancedTree &src, NodeId src_node, IoCounters &io);

  /// Inserts a same-level subtree under the root, in routing order.
  void attach_to_root(NodeId child, IoCounters &io);

  /// Unlinks the root's child at `index` and frees its subtree.
  void detach_from_root(std::size_t index, IoCounters &io);

  /// Ids written since the last call (live ones only), for mirroring.
  std::vector<NodeId> take_dirty();

  /// Direct mutable access, for negative-control tests.
  BPlusNode &mutable_node(NodeId id) noexcept { return nodes_[id.value]; }

 private:
  NodeId allocate(std::uint32_t height);
  void release_node(NodeId id);
  void release_subtree(NodeId id);
  void touch(NodeId id, IoCounters &io);

  /// Builds the pairs as a subtree of the given height whose top node has
  /// max(min_top, ceil(n / B^height)) children; returns the top node.
  NodeId build_subtree(std::span<const KeyRecordPair> pairs, std::uint32_t height,
                       std::uint64_t min_top, IoCounters &io);

  NodeId build_layout(const LayoutNode &layout);

  /// Recomputes weight and routing of `parent` from its children.
  void refresh(NodeId parent);

  bool try_borrow(NodeId parent, std::size_t vi, std::size_t si, IoCounters &io,
                  EraseReport &report);
  void merge_into(NodeId parent, std::size_t li, IoCounters &io, EraseReport &report);
  void rebuild_pair(NodeId parent, std::size_t li, IoCounters &io, EraseReport &report);

  TreeParams params_;
  std::vector<BPlusNode> nodes_{};
  std::vector<char> live_{};
  std::vector<NodeId> free_{};
  std::vector<NodeId> dirty_{};
  std::size_t live_count_{};
  NodeId root_{};
};

/// Checks fanout, weight and routing bookkeeping, trailing dummies, the balance bound
/// of every non-root node, a common leaf level, and a root with >= 2 children.
BalanceReport check_balance(const WeightBalancedTree &t);

/// Baseline range query: depth-first over non-outside nodes, one access per node.
std::vector<KeyRecordPair> classical_range_query(const WeightBalancedTree &t,
                                                 const QueryRange &r, IoCounters &io);

/// Smallest height H with B^{H+1} >= n (0 for n <= B).
std::uint32_t natural_height(std::uint64_t n, const TreeParams &params);

}  // namespace qbtree

#endif  // QBTREE_CLASSICAL_BTREE_HPP

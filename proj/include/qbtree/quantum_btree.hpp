#ifndef QBTREE_QUANTUM_BTREE_HPP
#define QBTREE_QUANTUM_BTREE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qbtree/classical_btree.hpp"
#include "qbtree/core.hpp"
#include "qbtree/metrics.hpp"
#include "qbtree/node.hpp"
#include "qbtree/qram.hpp"
#include "qbtree/qstate.hpp"

namespace qbtree
{
/**
 * @brief A weight-balanced B+ tree mirrored into a hierarchy QRAM and a data QRAM.
 *
 * q0[i*B+j] holds the j-th child of node i (i itself for a leaf, Dummy past the
 * fanout). q1[i*B+j] holds the j-th pair of leaf i, or the j-th child's routing key of
 * internal node i. Every classical write is followed by a re-mirror of the node.
 */
class QuantumBPlusTree
{
 public:
  /// bulk_load plus a full mirror; 2*M*B QRAM stores for M nodes.
  static QuantumBPlusTree build(const Dataset &d, TreeParams params, IoCounters &io);
  static QuantumBPlusTree build(std::span<const KeyRecordPair> sorted, TreeParams params,
                                IoCounters &io);
  static QuantumBPlusTree from_tree(WeightBalancedTree tree, IoCounters &io);

  [[nodiscard]] const WeightBalancedTree &tree() const noexcept { return tree_; }
  [[nodiscard]] const Qram &q0() const noexcept { return q0_; }
  [[nodiscard]] const Qram &q1() const noexcept { return q1_; }
  [[nodiscard]] const TreeParams &params() const noexcept { return tree_.params(); }
  [[nodiscard]] std::uint32_t height() const noexcept { return tree_.height(); }
  [[nodiscard]] std::uint64_t size() const noexcept { return tree_.size(); }

  /// Classical erase with repair, then re-mirror of every node it wrote.
  EraseReport erase(const KeyRecordPair &p, IoCounters &io);

  /// For structural edits made through mutable_tree(); call sync() afterwards.
  WeightBalancedTree &mutable_tree() noexcept { return tree_; }
  void sync(IoCounters &io);

  /// Cells of live nodes that disagree with the classical tree.
  [[nodiscard]] std::vector<std::string> verify_mirror() const;

 private:
  explicit QuantumBPlusTree(WeightBalancedTree tree) : tree_{std::move(tree)} {}
  void mirror_node(NodeId id, IoCounters &io);

  WeightBalancedTree tree_;
  Qram q0_{};
  Qram q1_{};
};

/*######################################################################################
 * Global classical search
 *####################################################################################*/

enum class NodeClass { kOutside, kPartial, kInside };

NodeClass classify_node(const RoutingKey &routing, const QueryRange &r) noexcept;

struct QuantumCandidates {
  std::uint32_t level{};
  std::vector<NodeId> nodes{};
};

/// Reached when no precise node exists; holds the in-range pairs of the last list.
struct LeafFallback {
  std::vector<KeyRecordPair> pairs{};
};

using GlobalOutcome = std::variant<QuantumCandidates, LeafFallback>;

/// Level-by-level narrowing. Stops at the first list holding a precise node: an
/// internal node with an inside child, or a leaf holding an in-range pair. One access
/// per node read.
GlobalOutcome global_classical_search(const WeightBalancedTree &t, const QueryRange &r,
                                      IoCounters &io);

/*######################################################################################
 * Local quantum search
 *####################################################################################*/

enum class EvalMode { kStochastic, kAnalytic };

/// A start node for the local search, with its height in its own tree.
struct SearchCandidate {
  NodeRef node{};
  std::uint32_t height{};
};

struct LocalSearchRequest {
  std::span<const SearchCandidate> candidates{};
  /// Pairs already known to be answers; they join at pair level with the same weight
  /// as every loaded slot.
  std::span<const KeyRecordPair> explicit_pairs{};
  const QramBank *hierarchy{};
  const QramBank *data{};
  std::uint32_t branching{};
  /// Amplitude-encoded start with weights B^{h(u)+1} (costs one access per item)
  /// instead of a uniform start over equal-height candidates.
  bool weighted_init{};
};

struct LocalSearchOutcome {
  WeightedState<KeyRecordPair> result;
  Rational success_probability{};
  /// Stochastic: rounds actually run. Analytic: total / in.
  Rational attempts{};
  std::uint64_t loads_per_attempt{};
  std::uint64_t init_accesses_per_attempt{};
};

using PairPredicate = std::function<bool(const KeyRecordPair &)>;

/// Initialise, descend max-height times, load pairs, mark with `pred`, post-select.
/// A failed round restarts from initialisation and pays its loads again. Throws
/// NoResults if nothing is marked.
LocalSearchOutcome run_local_search(const LocalSearchRequest &req, const PairPredicate &pred,
                                    EvalMode mode, Rng *rng, IoCounters &io);

LocalSearchOutcome local_quantum_search(const QuantumBPlusTree &t, const QuantumCandidates &c,
                                        const QueryRange &r, EvalMode mode, Rng *rng,
                                        IoCounters &io);

/*######################################################################################
 * Query
 *####################################################################################*/

enum class ResultKind { kSuperposition, kClassicalList, kEmpty };

/// IO of one query: classical accesses once, plus per-attempt loads and init accesses
/// times the (possibly expected) number of attempts.
struct QueryCost {
  std::uint64_t classical_accesses{};
  std::uint64_t loads_per_attempt{};
  std::uint64_t init_accesses_per_attempt{};
  Rational attempts{};

  [[nodiscard]] double io() const noexcept
  {
    return static_cast<double>(classical_accesses) +
           static_cast<double>(loads_per_attempt + init_accesses_per_attempt) *
               attempts.to_double();
  }
};

struct QueryResult {
  ResultKind kind{ResultKind::kEmpty};
  std::optional<WeightedState<KeyRecordPair>> state{};
  /// The answer for kClassicalList; pairs found outside the quantum path otherwise.
  std::vector<KeyRecordPair> classical{};
  Rational success_probability{};
  std::size_t candidate_count{};
  QueryCost cost{};

  /// Every pair the result represents, sorted.
  [[nodiscard]] std::vector<KeyRecordPair> support() const;
};

QueryResult query(const QuantumBPlusTree &t, const QueryRange &r, EvalMode mode, Rng *rng,
                  IoCounters &io);

}  // namespace qbtree

#endif  // QBTREE_QUANTUM_BTREE_HPP

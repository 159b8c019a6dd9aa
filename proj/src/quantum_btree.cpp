#include "qbtree/quantum_btree.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace qbtree
{
namespace
{
QramValue hierarchy_cell(const BPlusNode &n, std::uint32_t slot)
{
  if (n.is_leaf()) return n.id;
  if (slot < n.children.size()) return n.children[slot];
  return DummyValue{};
}

QramValue data_cell(const BPlusNode &n, std::uint32_t slot)
{
  if (n.is_leaf()) {
    if (slot < n.pairs.size()) return n.pairs[slot];
    return DummyValue{};
  }
  if (slot < n.child_routing.size()) return n.child_routing[slot];
  return DummyValue{};
}

TreeParams params_for(std::uint32_t branching)
{
  return TreeParams{branching, static_cast<std::uint32_t>(std::countr_zero(branching))};
}

}  // namespace

/*######################################################################################
 * Mirroring
 *####################################################################################*/

QuantumBPlusTree QuantumBPlusTree::build(const Dataset &d, TreeParams params, IoCounters &io)
{
  return from_tree(WeightBalancedTree::bulk_load(d, params, io), io);
}

QuantumBPlusTree QuantumBPlusTree::build(std::span<const KeyRecordPair> sorted,
                                         TreeParams params, IoCounters &io)
{
  return from_tree(WeightBalancedTree::bulk_load(sorted, params, io), io);
}

QuantumBPlusTree QuantumBPlusTree::from_tree(WeightBalancedTree tree, IoCounters &io)
{
  QuantumBPlusTree q{std::move(tree)};
  (void)q.tree_.take_dirty();
  for (const auto id : q.tree_.live_nodes()) q.mirror_node(id, io);
  return q;
}

void QuantumBPlusTree::mirror_node(NodeId id, IoCounters &io)
{
  const auto &n = tree_.node(id);
  const std::uint32_t b = params().branching;
  for (std::uint32_t j = 0; j < b; ++j) {
    const Address a = address_of(id, j, b);
    q0_.store(a, hierarchy_cell(n, j), io);
    q1_.store(a, data_cell(n, j), io);
  }
}

EraseReport QuantumBPlusTree::erase(const KeyRecordPair &p, IoCounters &io)
{
  auto report = tree_.erase(p, io);
  sync(io);
  return report;
}

void QuantumBPlusTree::sync(IoCounters &io)
{
  for (const auto id : tree_.take_dirty()) mirror_node(id, io);
}

std::vector<std::string> QuantumBPlusTree::verify_mirror() const
{
  std::vector<std::string> bad;
  const std::uint32_t b = params().branching;
  for (const auto id : tree_.live_nodes()) {
    const auto &n = tree_.node(id);
    for (std::uint32_t j = 0; j < b; ++j) {
      const Address a = address_of(id, j, b);
      if (!(q0_.peek(a) == hierarchy_cell(n, j)) || !(q1_.peek(a) == data_cell(n, j))) {
        std::ostringstream os;
        os << "node " << id.value << " slot " << j << " differs from its QRAM cells";
        bad.push_back(os.str());
      }
    }
  }
  return bad;
}

/*######################################################################################
 * Global classical search
 *####################################################################################*/

NodeClass classify_node(const RoutingKey &routing, const QueryRange &r) noexcept
{
  if (routing.is_dummy() || routing.hi < r.lo || routing.lo > r.hi) return NodeClass::kOutside;
  if (routing.lo >= r.lo && routing.hi <= r.hi) return NodeClass::kInside;
  return NodeClass::kPartial;
}

GlobalOutcome global_classical_search(const WeightBalancedTree &t, const QueryRange &r,
                                      IoCounters &io)
{
  ++io.classical_node_accesses;
  switch (classify_node(t.node(t.root()).routing(), r)) {
    case NodeClass::kOutside:
      return LeafFallback{};
    case NodeClass::kInside:
      return QuantumCandidates{0, {t.root()}};
    case NodeClass::kPartial:
      break;
  }

  std::vector<NodeId> list{t.root()};
  for (std::uint32_t level = 0;; ++level) {
    const auto precise = [&](NodeId id) {
      const auto &n = t.node(id);
      if (n.is_leaf()) {
        return std::any_of(n.pairs.begin(), n.pairs.end(),
                           [&](const KeyRecordPair &p) { return r.contains(p.key); });
      }
      return std::any_of(n.child_routing.begin(), n.child_routing.end(),
                         [&](const RoutingKey &k) {
                           return classify_node(k, r) == NodeClass::kInside;
                         });
    };
    if (std::any_of(list.begin(), list.end(), precise)) {
      return QuantumCandidates{level, list};
    }

    std::vector<NodeId> next;
    for (const auto id : list) {
      const auto &n = t.node(id);
      for (std::size_t j = 0; j < n.children.size(); ++j) {
        if (classify_node(n.child_routing[j], r) != NodeClass::kOutside) {
          next.push_back(n.children[j]);
        }
      }
    }
    if (next.empty()) {
      // only leaves without a hit can end up here
      LeafFallback fb;
      for (const auto id : list) {
        for (const auto &p : t.node(id).pairs) {
          if (r.contains(p.key)) fb.pairs.push_back(p);
        }
      }
      return fb;
    }
    io.classical_node_accesses += next.size();
    list = std::move(next);
  }
}

/*######################################################################################
 * Local quantum search
 *####################################################################################*/

LocalSearchOutcome run_local_search(const LocalSearchRequest &req, const PairPredicate &pred,
                                    EvalMode mode, Rng *rng, IoCounters &io)
{
  if (req.candidates.empty()) {
    throw Error{ErrorCode::kEmptySet, "local search without candidates"};
  }
  if (mode == EvalMode::kStochastic && rng == nullptr) {
    throw std::invalid_argument{"stochastic evaluation needs an Rng"};
  }
  const TreeParams tp = params_for(req.branching);
  std::uint32_t depth = 0;
  for (const auto &c : req.candidates) depth = std::max(depth, c.height);

  const IoCounters before = io.snapshot();
  WeightedState<NodeRef> state = [&] {
    if (req.weighted_init) {
      std::vector<std::pair<NodeRef, Weight>> items;
      items.reserve(req.candidates.size());
      for (const auto &c : req.candidates) items.emplace_back(c.node, tp.pow(c.height + 1));
      io.classical_node_accesses += req.explicit_pairs.size();
      return weighted_init<NodeRef>(items, io);
    }
    const bool same_height =
        std::all_of(req.candidates.begin(), req.candidates.end(),
                    [&](const SearchCandidate &c) { return c.height == depth; });
    if (!same_height || !req.explicit_pairs.empty()) {
      throw std::invalid_argument{"uniform start needs equal-height candidates only"};
    }
    std::vector<NodeRef> labels;
    labels.reserve(req.candidates.size());
    for (const auto &c : req.candidates) labels.push_back(c.node);
    return uniform_init<NodeRef>(labels);
  }();

  for (std::uint32_t s = 0; s < depth; ++s) state = descend(state, *req.hierarchy, req.branching, io);
  auto pairs = load_pairs(state, *req.data, req.branching, io);
  if (!req.explicit_pairs.empty()) {
    const Weight w = tp.pow(depth + 1);
    std::vector<std::pair<KeyRecordPair, Weight>> entries{pairs.entries().begin(),
                                                          pairs.entries().end()};
    for (const auto &p : req.explicit_pairs) entries.emplace_back(p, w);
    pairs = WeightedState<KeyRecordPair>::from_entries(std::move(entries));
  }
  const auto flagged = mark_if(pairs, [&](const KeyRecordPair &p) {
    return !p.is_dummy() && pred(p);
  });
  if (flagged.in_weight() == 0) {
    throw Error{ErrorCode::kNoResults, "no loaded pair satisfies the predicate"};
  }

  const IoCounters round = io.since(before);
  LocalSearchOutcome out{*flagged.in_state, success_probability(flagged), {},
                         round.qram_loads, round.classical_node_accesses};
  if (mode == EvalMode::kAnalytic) {
    out.attempts = expected_attempts(flagged);
    return out;
  }
  std::uint64_t rounds = 1;
  while (!post_select(flagged, *rng, io)) {
    ++rounds;
    io.qram_loads += out.loads_per_attempt;
    io.classical_node_accesses += out.init_accesses_per_attempt;
  }
  out.attempts = Rational{rounds, 1};
  return out;
}

LocalSearchOutcome local_quantum_search(const QuantumBPlusTree &t, const QuantumCandidates &c,
                                        const QueryRange &r, EvalMode mode, Rng *rng,
                                        IoCounters &io)
{
  const QramBank hierarchy{{&t.q0()}};
  const QramBank data{{&t.q1()}};
  std::vector<SearchCandidate> cands;
  cands.reserve(c.nodes.size());
  for (const auto id : c.nodes) cands.push_back({NodeRef{0, id}, t.tree().node(id).height});
  const LocalSearchRequest req{cands, {}, &hierarchy, &data, t.params().branching, false};
  return run_local_search(
      req, [&](const KeyRecordPair &p) { return r.contains(p.key); }, mode, rng, io);
}

/*######################################################################################
 * Query
 *####################################################################################*/

std::vector<KeyRecordPair> QueryResult::support() const
{
  std::vector<KeyRecordPair> out = classical;
  if (state) {
    for (const auto &[p, w] : state->entries()) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

QueryResult query(const QuantumBPlusTree &t, const QueryRange &r, EvalMode mode, Rng *rng,
                  IoCounters &io)
{
  const IoCounters before = io.snapshot();
  const auto outcome = global_classical_search(t.tree(), r, io);
  QueryResult res;
  res.cost.classical_accesses = io.since(before).classical_node_accesses;
  if (const auto *fb = std::get_if<LeafFallback>(&outcome)) {
    res.classical = fb->pairs;
    res.kind = res.classical.empty() ? ResultKind::kEmpty : ResultKind::kClassicalList;
    return res;
  }
  const auto &cands = std::get<QuantumCandidates>(outcome);
  auto local = local_quantum_search(t, cands, r, mode, rng, io);
  res.kind = ResultKind::kSuperposition;
  res.state = std::move(local.result);
  res.success_probability = local.success_probability;
  res.candidate_count = cands.nodes.size();
  res.cost.loads_per_attempt = local.loads_per_attempt;
  res.cost.init_accesses_per_attempt = local.init_accesses_per_attempt;
  res.cost.attempts = local.attempts;
  return res;
}

}  // namespace qbtree

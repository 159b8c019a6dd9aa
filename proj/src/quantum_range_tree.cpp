#include "qbtree/quantum_range_tree.hpp"

#include <algorithm>
#include <sstream>

namespace qbtree
{
CanonicalSet canonical_nodes(const WeightBalancedTree &t, const QueryRange &r, IoCounters &io)
{
  CanonicalSet out;
  const auto visit = [&](auto &&self, NodeId id) -> void {
    ++io.classical_node_accesses;
    const auto &n = t.node(id);
    switch (classify_node(n.routing(), r)) {
      case NodeClass::kOutside:
        return;
      case NodeClass::kInside:
        out.push_back({id, CoverKind::kSubtree});
        return;
      case NodeClass::kPartial:
        break;
    }
    if (n.is_leaf()) {
      out.push_back({id, CoverKind::kLeafScan});
      return;
    }
    for (const auto c : n.children) self(self, c);
  };
  visit(visit, t.root());
  return out;
}

/*######################################################################################
 * Build
 *####################################################################################*/

QuantumRangeTree QuantumRangeTree::build(std::vector<PointRecord> points, TreeParams params,
                                         IoCounters &io)
{
  if (points.empty()) throw Error{ErrorCode::kEmptyDataset, "range tree over no points"};
  const std::size_t d = points.front().key.size();
  if (d == 0) throw Error{ErrorCode::kDimensionMismatch, "points need at least one coordinate"};
  for (const auto &p : points) {
    if (p.key.size() != d) throw Error{ErrorCode::kDimensionMismatch, "points differ in d"};
  }
  QuantumRangeTree t;
  t.params_ = params;
  t.dims_ = d;
  t.points_ = std::move(points);
  std::vector<std::uint64_t> all(t.points_.size());
  for (std::uint64_t i = 0; i < all.size(); ++i) all[i] = i;
  t.top_ = t.build_level(all, static_cast<std::uint32_t>(d - 1), io);
  return t;
}

std::unique_ptr<RangeTreeLevel> QuantumRangeTree::build_level(
    const std::vector<std::uint64_t> &idx, std::uint32_t coord, IoCounters &io) const
{
  std::vector<KeyRecordPair> pairs;
  pairs.reserve(idx.size());
  for (const auto i : idx) pairs.push_back({points_[i].key[coord], RecordHandle{i}});
  std::sort(pairs.begin(), pairs.end());

  auto level = std::make_unique<RangeTreeLevel>(
      RangeTreeLevel{coord, QuantumBPlusTree::build(pairs, params_, io), {}});
  if (coord == 0) return level;

  const auto &tree = level->tree.tree();
  level->secondary.resize(tree.id_extent());
  for (const auto id : tree.live_nodes()) {
    if (tree.node(id).is_leaf()) continue;
    std::vector<std::uint64_t> below;
    for (const auto &p : tree.collect_pairs(id)) below.push_back(p.rec.id);
    level->secondary[id.value] = build_level(below, coord - 1, io);
  }
  return level;
}

KeyRecordPair QuantumRangeTree::label(std::uint64_t idx) const
{
  return {points_[idx].key[0], RecordHandle{idx}};
}

/*######################################################################################
 * Queries
 *####################################################################################*/

namespace
{
/// 1-d trees whose contents satisfy every coordinate above 0, and the directly read
/// point indices that satisfy the whole box.
struct Decomposition {
  std::vector<const QuantumBPlusTree *> trees{};
  std::vector<std::uint64_t> direct{};
};

void decompose(const RangeTreeLevel &level, const BoxRange &box,
               const std::vector<PointRecord> &points, Decomposition &out, IoCounters &io)
{
  if (level.coord == 0) {
    out.trees.push_back(&level.tree);
    return;
  }
  const auto &t = level.tree.tree();
  for (const auto &c : canonical_nodes(t, box.dims[level.coord], io)) {
    const auto &n = t.node(c.node);
    if (n.is_leaf()) {
      for (const auto &p : n.pairs) {
        if (box.contains(points[p.rec.id].key)) out.direct.push_back(p.rec.id);
      }
    } else {
      decompose(*level.secondary[c.node.value], box, points, out, io);
    }
  }
}

}  // namespace

QueryResult QuantumRangeTree::query(const BoxRange &box, EvalMode mode, Rng *rng,
                                    IoCounters &io) const
{
  if (box.dims.size() != dims_) throw Error{ErrorCode::kDimensionMismatch, "box dimension"};
  if (dims_ == 1) return qbtree::query(top_->tree, box.dims[0], mode, rng, io);

  const IoCounters before = io.snapshot();
  Decomposition dec;
  decompose(*top_, box, points_, dec, io);

  QueryResult res;
  std::vector<KeyRecordPair> direct;
  for (const auto i : dec.direct) direct.push_back(label(i));

  QramBank hierarchy;
  QramBank data;
  std::vector<SearchCandidate> cands;
  for (const auto *t : dec.trees) {
    auto outcome = global_classical_search(t->tree(), box.dims[0], io);
    if (auto *fb = std::get_if<LeafFallback>(&outcome)) {
      for (const auto &p : fb->pairs) {
        if (box.contains(points_[p.rec.id].key)) direct.push_back(p);
      }
      continue;
    }
    const std::uint32_t bank = hierarchy.add(t->q0());
    data.add(t->q1());
    for (const auto id : std::get<QuantumCandidates>(outcome).nodes) {
      cands.push_back({NodeRef{bank, id}, t->tree().node(id).height});
    }
  }
  std::sort(direct.begin(), direct.end());
  res.cost.classical_accesses = io.since(before).classical_node_accesses;

  if (cands.empty()) {
    res.classical = std::move(direct);
    res.kind = res.classical.empty() ? ResultKind::kEmpty : ResultKind::kClassicalList;
    return res;
  }
  const LocalSearchRequest req{cands, direct, &hierarchy, &data, params_.branching, true};
  auto local = run_local_search(
      req, [&](const KeyRecordPair &p) { return box.contains(points_[p.rec.id].key); },
      mode, rng, io);
  res.kind = ResultKind::kSuperposition;
  res.state = std::move(local.result);
  res.success_probability = local.success_probability;
  res.candidate_count = cands.size();
  res.cost.loads_per_attempt = local.loads_per_attempt;
  res.cost.init_accesses_per_attempt = local.init_accesses_per_attempt;
  res.cost.attempts = local.attempts;
  return res;
}

std::vector<PointRecord> QuantumRangeTree::resolve(const QueryResult &res) const
{
  std::vector<PointRecord> out;
  for (const auto &p : res.support()) out.push_back(points_[p.rec.id]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointRecord> QuantumRangeTree::classical_query(const BoxRange &box,
                                                           IoCounters &io) const
{
  if (box.dims.size() != dims_) throw Error{ErrorCode::kDimensionMismatch, "box dimension"};
  Decomposition dec;
  decompose(*top_, box, points_, dec, io);
  std::vector<PointRecord> out;
  for (const auto i : dec.direct) out.push_back(points_[i]);
  for (const auto *t : dec.trees) {
    for (const auto &p : classical_range_query(t->tree(), box.dims[0], io)) {
      out.push_back(points_[p.rec.id]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/*######################################################################################
 * Audit
 *####################################################################################*/

std::vector<std::string> QuantumRangeTree::audit() const
{
  std::vector<std::string> bad;
  const auto walk = [&](auto &&self, const RangeTreeLevel &level, const std::string &where) -> void {
    const auto &t = level.tree.tree();
    for (const auto &v : check_balance(t).violations) bad.push_back(where + v);
    for (const auto &v : level.tree.verify_mirror()) bad.push_back(where + v);
    for (const auto &p : t.collect_pairs()) {
      if (p.key != points_[p.rec.id].key[level.coord]) {
        bad.push_back(where + "pair key is not the point's coordinate");
      }
    }
    if (level.coord == 0) return;
    for (const auto id : t.live_nodes()) {
      const auto &n = t.node(id);
      const bool has = id.value < level.secondary.size() && level.secondary[id.value];
      std::ostringstream at;
      at << where << "node " << id.value << ": ";
      if (n.is_leaf()) {
        if (has) bad.push_back(at.str() + "leaf carries a secondary tree");
        continue;
      }
      if (!has) {
        bad.push_back(at.str() + "internal node without a secondary tree");
        continue;
      }
      const auto &sec = *level.secondary[id.value];
      if (sec.coord + 1 != level.coord) bad.push_back(at.str() + "secondary on wrong coordinate");
      std::vector<std::uint64_t> mine;
      std::vector<std::uint64_t> theirs;
      for (const auto &p : t.collect_pairs(id)) mine.push_back(p.rec.id);
      for (const auto &p : sec.tree.tree().collect_pairs()) theirs.push_back(p.rec.id);
      std::sort(mine.begin(), mine.end());
      std::sort(theirs.begin(), theirs.end());
      if (mine != theirs) bad.push_back(at.str() + "secondary holds other points");
      self(self, sec, at.str());
    }
  };
  walk(walk, *top_, "");
  return bad;
}

}  // namespace qbtree

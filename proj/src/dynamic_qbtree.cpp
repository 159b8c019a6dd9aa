#include "qbtree/dynamic_qbtree.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace qbtree
{
namespace
{
std::uint64_t ceil_log2(std::uint64_t x)
{
  return x <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(x - 1));
}

QuantumBPlusTree build_tree(std::span<const KeyRecordPair> sorted, TreeParams params,
                            std::uint32_t height, IoCounters &io)
{
  return QuantumBPlusTree::from_tree(
      WeightBalancedTree::build_with_height(sorted, params, height, io), io);
}

std::vector<KeyRecordPair> merged_pairs(const std::vector<const QuantumBPlusTree *> &trees,
                                        IoCounters &io)
{
  std::vector<KeyRecordPair> out;
  for (const auto *t : trees) {
    auto part = t->tree().collect_pairs(t->tree().root(), &io);
    const auto mid = static_cast<std::ptrdiff_t>(out.size());
    out.insert(out.end(), part.begin(), part.end());
    std::inplace_merge(out.begin(), out.begin() + mid, out.end());
  }
  return out;
}

}  // namespace

/*######################################################################################
 * T0 and T1
 *####################################################################################*/

std::uint64_t PairIdIndex::cost() const
{
  std::uint64_t levels = 1;
  for (std::uint64_t cap = params_.branching; cap < map_.size(); cap *= params_.branching) {
    ++levels;
  }
  return levels + 1;
}

std::optional<std::uint64_t> PairIdIndex::find(const KeyRecordPair &p, IoCounters &io) const
{
  io.classical_node_accesses += cost();
  return peek(p);
}

std::optional<std::uint64_t> PairIdIndex::peek(const KeyRecordPair &p) const
{
  const auto it = map_.find(p);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void PairIdIndex::insert(const KeyRecordPair &p, std::uint64_t id, IoCounters &io)
{
  io.classical_node_accesses += cost();
  map_.emplace(p, id);
}

void PairIdIndex::erase(const KeyRecordPair &p, IoCounters &io)
{
  io.classical_node_accesses += cost();
  map_.erase(p);
}

std::uint64_t IdLevelMap::cost() const { return ceil_log2(map_.size()) + 1; }

void IdLevelMap::split_at(std::uint64_t at)
{
  auto it = map_.upper_bound(at);
  if (it == map_.begin()) return;
  --it;
  if (it->first == at || it->second.hi < at) return;
  const Span tail{it->second.hi, it->second.level};
  it->second.hi = at - 1;
  map_.emplace(at, tail);
}

void IdLevelMap::assign(std::uint64_t lo, std::uint64_t hi, int level, IoCounters &io)
{
  io.classical_node_accesses += cost();
  split_at(lo);
  if (hi != UINT64_MAX) split_at(hi + 1);
  map_.erase(map_.lower_bound(lo), map_.upper_bound(hi));
  auto it = map_.emplace(lo, Span{hi, level}).first;

  if (auto next = std::next(it); next != map_.end() && next->first == hi + 1 &&
                                 next->second.level == level) {
    it->second.hi = next->second.hi;
    map_.erase(next);
  }
  if (it != map_.begin()) {
    auto prev = std::prev(it);
    if (prev->second.hi + 1 == lo && prev->second.level == level) {
      prev->second.hi = it->second.hi;
      map_.erase(it);
    }
  }
}

std::optional<int> IdLevelMap::find(std::uint64_t id, IoCounters &io) const
{
  io.classical_node_accesses += cost();
  return peek(id);
}

std::optional<int> IdLevelMap::peek(std::uint64_t id) const
{
  auto it = map_.upper_bound(id);
  if (it == map_.begin()) return std::nullopt;
  --it;
  if (it->second.hi < id) return std::nullopt;
  return it->second.level;
}

/*######################################################################################
 * Updates
 *####################################################################################*/

DynamicQuantumBTree::DynamicQuantumBTree(TreeParams params) : params_{params}, t0_{params} {}

DynamicQuantumBTree::Forest &DynamicQuantumBTree::level(std::size_t i)
{
  if (forests_.size() <= i) forests_.resize(i + 1);
  return forests_[i];
}

void DynamicQuantumBTree::relabel(const std::vector<KeyRecordPair> &pairs, int lvl,
                                  IoCounters &io)
{
  std::vector<std::uint64_t> ids;
  ids.reserve(pairs.size());
  for (const auto &p : pairs) ids.push_back(*t0_.peek(p));
  std::sort(ids.begin(), ids.end());
  // dead ids between two members may join their run
  std::size_t start = 0;
  for (std::size_t j = 1; j <= ids.size(); ++j) {
    bool cut = j == ids.size();
    for (std::uint64_t x = cut ? 0 : ids[j - 1] + 1; !cut && x < ids[j]; ++x) {
      cut = id_live_[x] != 0;
    }
    if (cut) {
      t1_.assign(ids[start], ids[j - 1], lvl, io);
      start = j;
    }
  }
}

void DynamicQuantumBTree::place(QuantumBPlusTree tree, IoCounters &io)
{
  const std::uint32_t h = tree.height();
  relabel(tree.tree().collect_pairs(), static_cast<int>(h), io);
  level(h).push_back(std::move(tree));
}

void DynamicQuantumBTree::normalize(IoCounters &io)
{
  for (std::size_t i = 0; i < forests_.size();) {
    if (forests_[i].size() >= params_.branching) {
      merge_level(i, io);
      i = 0;
    } else {
      ++i;
    }
  }
}

void DynamicQuantumBTree::merge_level(std::size_t i, IoCounters &io)
{
  auto &f = forests_[i];
  const auto take = static_cast<std::ptrdiff_t>(params_.branching);
  std::vector<const QuantumBPlusTree *> group;
  for (auto it = f.begin(); it != f.begin() + take; ++it) group.push_back(&*it);
  const auto pairs = merged_pairs(group, io);

  // a height-(i+1) tree needs two children of weight >= B^{i+1}/4
  const auto h = static_cast<std::uint32_t>(i + 1);
  const std::uint32_t height =
      2 * pairs.size() >= params_.pow(h) ? h : natural_height(pairs.size(), params_);
  auto merged = build_tree(pairs, params_, height, io);
  f.erase(f.begin(), f.begin() + take);
  place(std::move(merged), io);
}

void DynamicQuantumBTree::insert(const KeyRecordPair &p, IoCounters &io)
{
  if (t0_.find(p, io)) throw Error{ErrorCode::kDuplicatePair, "pair is already stored"};
  const std::uint64_t id = id_live_.size();
  id_live_.push_back(1);
  t0_.insert(p, id, io);
  buffer_.insert(std::upper_bound(buffer_.begin(), buffer_.end(), p), p);
  ++io.classical_node_accesses;
  t1_.assign(id, id, IdLevelMap::kBuffer, io);
  if (buffer_.size() >= params_.branching) flush(io);
}

void DynamicQuantumBTree::flush(IoCounters &io)
{
  if (buffer_.empty()) return;
  auto tree = build_tree(buffer_, params_, 0, io);
  buffer_.clear();
  place(std::move(tree), io);
  normalize(io);
}

void DynamicQuantumBTree::erase(const KeyRecordPair &p, IoCounters &io)
{
  const auto id = t0_.find(p, io);
  if (!id) throw Error{ErrorCode::kNotFound, "pair is not stored"};
  const int lvl = *t1_.find(*id, io);

  if (lvl == IdLevelMap::kBuffer) {
    buffer_.erase(std::lower_bound(buffer_.begin(), buffer_.end(), p));
    ++io.classical_node_accesses;
  } else {
    const auto i = static_cast<std::size_t>(lvl);
    auto &f = forests_[i];
    std::size_t k = 0;
    std::optional<EraseReport> report;
    for (; k < f.size(); ++k) {
      const auto routing = f[k].tree().node(f[k].tree().root()).routing();
      if (routing.is_dummy() || p.key < routing.lo || p.key > routing.hi) {
        ++io.classical_node_accesses;
        continue;
      }
      try {
        report = f[k].erase(p, io);
        break;
      } catch (const Error &e) {
        if (e.code() != ErrorCode::kNotFound) throw;
      }
    }
    if (!report) throw std::logic_error{"T1 points at a forest without the pair"};

    if (f[k].size() == 0) {
      f.erase(f.begin() + static_cast<std::ptrdiff_t>(k));
    } else if (f[k].height() != i) {
      auto moved = std::move(f[k]);
      f.erase(f.begin() + static_cast<std::ptrdiff_t>(k));
      t0_.erase(p, io);
      id_live_[*id] = 0;
      place(std::move(moved), io);
      normalize(io);
      return;
    } else if (report->root_underfull) {
      t0_.erase(p, io);
      id_live_[*id] = 0;
      repair_root(i, k, io);
      return;
    }
  }
  t0_.erase(p, io);
  id_live_[*id] = 0;
}

bool DynamicQuantumBTree::borrow_root_child(std::size_t i, std::size_t k, IoCounters &io)
{
  auto &f = forests_[i];
  const auto &tn = f[k].tree().node(f[k].tree().root());
  const RoutingKey have = tn.child_routing.front();
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (j == k) continue;
    ++io.classical_node_accesses;
    const auto &un = f[j].tree().node(f[j].tree().root());
    if (un.children.size() < 3) continue;
    std::optional<std::size_t> pick;
    if (un.child_routing.front().hi <= have.lo) {
      pick = 0;
    } else if (un.child_routing.back().lo >= have.hi) {
      pick = un.children.size() - 1;
    }
    if (!pick) continue;
    auto &dst = f[k].mutable_tree();
    const NodeId copy = dst.graft(f[j].tree(), un.children[*pick], io);
    dst.attach_to_root(copy, io);
    f[k].sync(io);
    f[j].mutable_tree().detach_from_root(*pick, io);
    f[j].sync(io);
    return true;
  }
  return false;
}

void DynamicQuantumBTree::repair_root(std::size_t i, std::size_t k, IoCounters &io)
{
  if (borrow_root_child(i, k, io)) return;
  auto &f = forests_[i];

  if (f.size() >= 2) {
    const std::size_t j = k + 1 < f.size() ? k + 1 : k - 1;
    const auto pairs = merged_pairs({&f[k], &f[j]}, io);
    const auto hi = static_cast<std::ptrdiff_t>(std::max(j, k));
    const auto lo = static_cast<std::ptrdiff_t>(std::min(j, k));
    f.erase(f.begin() + hi);
    f.erase(f.begin() + lo);
    const auto h = static_cast<std::uint32_t>(i);
    if (pairs.size() > params_.pow(h + 1)) {
      const std::span<const KeyRecordPair> all{pairs};
      const std::size_t half = pairs.size() / 2;
      f.push_back(build_tree(all.first(half), params_, h, io));
      f.push_back(build_tree(all.subspan(half), params_, h, io));
    } else {
      f.push_back(build_tree(pairs, params_, h, io));
    }
    return;
  }

  auto tree = std::move(f[k]);
  f.erase(f.begin() + static_cast<std::ptrdiff_t>(k));
  tree.mutable_tree().collapse_root(io);
  tree.sync(io);
  const bool still_underfull = tree.tree().node(tree.tree().root()).children.size() == 1;
  place(std::move(tree), io);
  if (still_underfull) repair_root(i - 1, forests_[i - 1].size() - 1, io);
  normalize(io);
}

/*######################################################################################
 * Queries
 *####################################################################################*/

QueryResult DynamicQuantumBTree::query(const QueryRange &r, EvalMode mode, Rng *rng,
                                       IoCounters &io) const
{
  const IoCounters before = io.snapshot();
  QueryResult res;
  if (!buffer_.empty()) {
    ++io.classical_node_accesses;
    for (const auto &p : buffer_) {
      if (r.contains(p.key)) res.classical.push_back(p);
    }
  }

  QramBank hierarchy;
  QramBank data;
  std::vector<SearchCandidate> cands;
  for (const auto &f : forests_) {
    for (const auto &t : f) {
      auto outcome = global_classical_search(t.tree(), r, io);
      if (auto *fb = std::get_if<LeafFallback>(&outcome)) {
        res.classical.insert(res.classical.end(), fb->pairs.begin(), fb->pairs.end());
        continue;
      }
      const std::uint32_t bank = hierarchy.add(t.q0());
      data.add(t.q1());
      for (const auto id : std::get<QuantumCandidates>(outcome).nodes) {
        cands.push_back({NodeRef{bank, id}, t.tree().node(id).height});
      }
    }
  }
  std::sort(res.classical.begin(), res.classical.end());
  res.cost.classical_accesses = io.since(before).classical_node_accesses;

  if (cands.empty()) {
    res.kind = res.classical.empty() ? ResultKind::kEmpty : ResultKind::kClassicalList;
    return res;
  }
  const LocalSearchRequest req{cands, {}, &hierarchy, &data, params_.branching, true};
  auto local = run_local_search(
      req, [&](const KeyRecordPair &p) { return r.contains(p.key); }, mode, rng, io);
  res.kind = ResultKind::kSuperposition;
  res.state = std::move(local.result);
  res.success_probability = local.success_probability;
  res.candidate_count = cands.size();
  res.cost.loads_per_attempt = local.loads_per_attempt;
  res.cost.init_accesses_per_attempt = local.init_accesses_per_attempt;
  res.cost.attempts = local.attempts;
  return res;
}

std::vector<KeyRecordPair> DynamicQuantumBTree::classical_query(const QueryRange &r,
                                                                IoCounters &io) const
{
  std::vector<KeyRecordPair> out;
  if (!buffer_.empty()) {
    ++io.classical_node_accesses;
    for (const auto &p : buffer_) {
      if (r.contains(p.key)) out.push_back(p);
    }
  }
  for (const auto &f : forests_) {
    for (const auto &t : f) {
      auto part = classical_range_query(t.tree(), r, io);
      out.insert(out.end(), part.begin(), part.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/*######################################################################################
 * Audit
 *####################################################################################*/

ForestReport DynamicQuantumBTree::check_invariants() const
{
  ForestReport rep;
  const auto fail = [&](const std::string &what) { rep.violations.push_back(what); };
  const auto check_pair = [&](const KeyRecordPair &p, int lvl) {
    const auto id = t0_.peek(p);
    if (!id) {
      fail("pair missing from T0");
      return;
    }
    if (*id >= id_live_.size() || id_live_[*id] == 0) fail("T0 id of a live pair is dead");
    if (t1_.peek(*id) != lvl) {
      std::ostringstream os;
      os << "T1 sends id " << *id << " to the wrong place (expected " << lvl << ")";
      fail(os.str());
    }
  };

  if (buffer_.size() >= params_.branching) fail("buffer holds B or more pairs");
  if (!std::is_sorted(buffer_.begin(), buffer_.end())) fail("buffer is not sorted");
  std::uint64_t total = buffer_.size();
  for (const auto &p : buffer_) check_pair(p, IdLevelMap::kBuffer);

  for (std::size_t i = 0; i < forests_.size(); ++i) {
    const auto &f = forests_[i];
    if (f.size() >= params_.branching) {
      fail("F[" + std::to_string(i) + "] holds B or more trees");
    }
    for (std::size_t k = 0; k < f.size(); ++k) {
      const auto &t = f[k];
      const std::string where = "F[" + std::to_string(i) + "][" + std::to_string(k) + "]: ";
      if (t.height() != i) fail(where + "height differs from the forest index");
      if (t.size() == 0) fail(where + "empty tree");
      for (const auto &v : check_balance(t.tree()).violations) fail(where + v);
      for (const auto &v : t.verify_mirror()) fail(where + v);
      const auto pairs = t.tree().collect_pairs();
      total += pairs.size();
      for (const auto &p : pairs) check_pair(p, static_cast<int>(i));
    }
  }
  if (total != t0_.size()) fail("T0 size differs from the number of stored pairs");
  return rep;
}

}  // namespace qbtree

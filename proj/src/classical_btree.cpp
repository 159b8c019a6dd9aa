#include "qbtree/classical_btree.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace qbtree
{
namespace
{
bool overlaps(const RoutingKey &k, const QueryRange &r) noexcept
{
  return !k.is_dummy() && k.hi >= r.lo && k.lo <= r.hi;
}

std::string describe(NodeId id, const char *what)
{
  std::ostringstream os;
  os << "node " << id.value << ": " << what;
  return os.str();
}

}  // namespace

RoutingKey BPlusNode::routing() const noexcept
{
  if (is_leaf()) {
    if (pairs.empty()) return RoutingKey::dummy();
    return {pairs.front().key, pairs.back().key};
  }
  if (child_routing.empty()) return RoutingKey::dummy();
  return {child_routing.front().lo, child_routing.back().hi};
}

const NodeBalance *BalanceReport::find(NodeId id) const noexcept
{
  for (const auto &n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::uint32_t natural_height(std::uint64_t n, const TreeParams &params)
{
  std::uint32_t h = 0;
  while (params.pow(h + 1) < n) ++h;
  return h;
}

/*######################################################################################
 * Construction
 *####################################################################################*/

WeightBalancedTree::WeightBalancedTree(TreeParams params) : params_{params}
{
  root_ = allocate(0);
}

WeightBalancedTree WeightBalancedTree::bulk_load(const Dataset &d, TreeParams params,
                                                 IoCounters &io)
{
  return bulk_load(d.pairs(), params, io);
}

WeightBalancedTree WeightBalancedTree::bulk_load(std::span<const KeyRecordPair> sorted,
                                                 TreeParams params, IoCounters &io)
{
  if (sorted.empty()) throw Error{ErrorCode::kEmptyDataset, "bulk_load of an empty dataset"};
  return build_with_height(sorted, params, natural_height(sorted.size(), params), io);
}

WeightBalancedTree WeightBalancedTree::build_with_height(std::span<const KeyRecordPair> sorted,
                                                         TreeParams params,
                                                         std::uint32_t height, IoCounters &io)
{
  if (sorted.empty()) throw Error{ErrorCode::kEmptyDataset, "build of an empty dataset"};
  WeightBalancedTree t{params};
  // hand id 0 back so the build numbers breadth-first from zero
  t.release_node(t.root_);
  t.root_ = t.build_subtree(sorted, height, height == 0 ? 1 : 2, io);
  return t;
}

WeightBalancedTree WeightBalancedTree::from_layout(const LayoutNode &root, TreeParams params)
{
  WeightBalancedTree t{params};
  t.release_node(t.root_);
  t.root_ = t.build_layout(root);
  for (const auto id : t.live_nodes()) t.dirty_.push_back(id);
  return t;
}

NodeId WeightBalancedTree::allocate(std::uint32_t height)
{
  NodeId id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
    nodes_[id.value] = BPlusNode{};
    live_[id.value] = 1;
  } else {
    id = NodeId{nodes_.size()};
    nodes_.emplace_back();
    live_.push_back(1);
  }
  nodes_[id.value].id = id;
  nodes_[id.value].height = height;
  ++live_count_;
  return id;
}

void WeightBalancedTree::release_node(NodeId id)
{
  live_[id.value] = 0;
  nodes_[id.value] = BPlusNode{};
  free_.push_back(id);
  --live_count_;
}

void WeightBalancedTree::release_subtree(NodeId id)
{
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const NodeId cur = stack.back();
    stack.pop_back();
    for (const auto c : nodes_[cur.value].children) stack.push_back(c);
    release_node(cur);
  }
}

void WeightBalancedTree::touch(NodeId id, IoCounters &io)
{
  ++io.classical_node_accesses;
  dirty_.push_back(id);
}

NodeId WeightBalancedTree::build_subtree(std::span<const KeyRecordPair> pairs,
                                         std::uint32_t height, std::uint64_t min_top,
                                         IoCounters &io)
{
  const std::uint64_t n = pairs.size();
  const std::uint64_t b = params_.branching;
  if (height == 0) {
    if (n > b) throw Error{ErrorCode::kInvalidConfig, "leaf overflow in build"};
    const NodeId leaf = allocate(0);
    nodes_[leaf.value].pairs.assign(pairs.begin(), pairs.end());
    nodes_[leaf.value].weight = n;
    touch(leaf, io);
    return leaf;
  }
  const std::uint64_t span_h = params_.pow(height);
  const std::uint64_t top = std::max(min_top, (n + span_h - 1) / span_h);
  const std::uint64_t leaves = top * (span_h / b);
  if (top > b || n < leaves) {
    std::ostringstream os;
    os << n << " pairs cannot fill a subtree of height " << height;
    throw Error{ErrorCode::kInvalidConfig, os.str()};
  }

  // ids breadth-first: the top node, then each level left to right
  std::vector<std::vector<NodeId>> levels(height + 1);
  levels[0].push_back(allocate(height));
  std::uint64_t count = top;
  for (std::uint32_t depth = 1; depth <= height; ++depth) {
    levels[depth].reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) levels[depth].push_back(allocate(height - depth));
    count *= b;
  }

  const std::uint64_t base = n / leaves;
  const std::uint64_t rem = n % leaves;
  std::uint64_t offset = 0;
  for (std::uint64_t i = 0; i < leaves; ++i) {
    const std::uint64_t take = base + (i < rem ? 1 : 0);
    auto &leaf = nodes_[levels[height][i].value];
    leaf.pairs.assign(pairs.begin() + static_cast<std::ptrdiff_t>(offset),
                      pairs.begin() + static_cast<std::ptrdiff_t>(offset + take));
    leaf.weight = take;
    offset += take;
    touch(leaf.id, io);
  }

  for (std::uint32_t depth = height; depth-- > 0;) {
    const auto &below = levels[depth + 1];
    for (std::size_t i = 0; i < levels[depth].size(); ++i) {
      const std::size_t first = depth == 0 ? 0 : i * b;
      const std::size_t last = depth == 0 ? below.size() : first + b;
      auto &node = nodes_[levels[depth][i].value];
      node.children.assign(below.begin() + static_cast<std::ptrdiff_t>(first),
                           below.begin() + static_cast<std::ptrdiff_t>(last));
      refresh(node.id);
      touch(node.id, io);
    }
  }
  return levels[0][0];
}

NodeId WeightBalancedTree::build_layout(const LayoutNode &layout)
{
  const auto height_of = [](const LayoutNode &l) {
    std::uint32_t h = 0;
    for (const LayoutNode *cur = &l; !cur->children.empty(); cur = &cur->children.front()) ++h;
    return h;
  };
  const NodeId top = allocate(height_of(layout));
  std::deque<std::pair<const LayoutNode *, NodeId>> bfs{{&layout, top}};
  std::vector<NodeId> order;
  while (!bfs.empty()) {
    const auto [l, id] = bfs.front();
    bfs.pop_front();
    order.push_back(id);
    if (l->children.empty()) {
      if (nodes_[id.value].height != 0) {
        throw Error{ErrorCode::kInvalidConfig, "layout leaves at unequal depths"};
      }
      nodes_[id.value].pairs = l->pairs;
      std::sort(nodes_[id.value].pairs.begin(), nodes_[id.value].pairs.end());
      nodes_[id.value].weight = l->pairs.size();
      continue;
    }
    const std::uint32_t h = nodes_[id.value].height;
    if (h == 0) throw Error{ErrorCode::kInvalidConfig, "layout leaves at unequal depths"};
    for (const auto &c : l->children) {
      const NodeId cid = allocate(h - 1);
      nodes_[id.value].children.push_back(cid);
      bfs.emplace_back(&c, cid);
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (!nodes_[it->value].is_leaf()) refresh(*it);
  }
  return top;
}

void WeightBalancedTree::refresh(NodeId parent)
{
  auto &p = nodes_[parent.value];
  if (p.is_leaf()) {
    p.weight = p.pairs.size();
    return;
  }
  p.weight = 0;
  p.child_routing.resize(p.children.size());
  for (std::size_t j = 0; j < p.children.size(); ++j) {
    const auto &c = nodes_[p.children[j].value];
    p.weight += c.weight;
    p.child_routing[j] = c.routing();
  }
}

std::vector<NodeId> WeightBalancedTree::live_nodes() const
{
  std::vector<NodeId> out;
  out.reserve(live_count_);
  for (std::uint64_t i = 0; i < live_.size(); ++i) {
    if (live_[i] != 0) out.push_back(NodeId{i});
  }
  return out;
}

std::vector<NodeId> WeightBalancedTree::take_dirty()
{
  std::vector<NodeId> out;
  out.swap(dirty_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](NodeId id) { return !is_live(id); });
  return out;
}

/*######################################################################################
 * Lookup
 *####################################################################################*/

std::vector<KeyRecordPair> WeightBalancedTree::collect_pairs(NodeId id, IoCounters *io) const
{
  std::vector<KeyRecordPair> out;
  out.reserve(node(id).weight);
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    const auto &n = node(stack.back());
    stack.pop_back();
    if (io != nullptr) ++io->classical_node_accesses;
    if (n.is_leaf()) {
      out.insert(out.end(), n.pairs.begin(), n.pairs.end());
    } else {
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
    }
  }
  return out;
}

std::optional<std::vector<NodeId>> WeightBalancedTree::find_path(const KeyRecordPair &p,
                                                                 IoCounters &io) const
{
  std::vector<NodeId> path;
  const auto dfs = [&](auto &&self, NodeId id) -> bool {
    ++io.classical_node_accesses;
    path.push_back(id);
    const auto &n = node(id);
    if (n.is_leaf()) {
      if (std::binary_search(n.pairs.begin(), n.pairs.end(), p)) return true;
    } else {
      for (std::size_t j = 0; j < n.children.size(); ++j) {
        const auto &r = n.child_routing[j];
        if (r.lo > p.key) break;
        if (p.key <= r.hi && self(self, n.children[j])) return true;
      }
    }
    path.pop_back();
    return false;
  };
  if (!dfs(dfs, root_)) return std::nullopt;
  return path;
}

/*######################################################################################
 * Deletion
 *####################################################################################*/

EraseReport WeightBalancedTree::erase(const KeyRecordPair &p, IoCounters &io)
{
  auto found = find_path(p, io);
  if (!found) throw Error{ErrorCode::kNotFound, "pair is not stored in the tree"};
  const auto &path = *found;

  auto &leaf = nodes_[path.back().value];
  leaf.pairs.erase(std::lower_bound(leaf.pairs.begin(), leaf.pairs.end(), p));
  leaf.weight = leaf.pairs.size();
  touch(leaf.id, io);
  for (std::size_t d = path.size() - 1; d-- > 0;) {
    refresh(path[d]);
    touch(path[d], io);
  }

  EraseReport report;
  const std::uint64_t b = params_.branching;
  bool force = false;
  for (std::size_t d = path.size() - 1; d >= 1; --d) {
    const NodeId v = path[d];
    const NodeId parent = path[d - 1];
    const auto &vn = node(v);
    if (!force && vn.weight >= min_weight(vn.height)) continue;
    const auto &siblings = node(parent).children;
    if (siblings.size() == 1) {
      // the parent is as light as v; repair there with a full rebuild
      force = true;
      continue;
    }
    const std::size_t vi = static_cast<std::size_t>(
        std::find(siblings.begin(), siblings.end(), v) - siblings.begin());
    const bool has_right = vi + 1 < siblings.size();
    const bool has_left = vi > 0;
    if (!force) {
      if (has_right && try_borrow(parent, vi, vi + 1, io, report)) continue;
      if (has_left && try_borrow(parent, vi, vi - 1, io, report)) continue;
      ++io.classical_node_accesses;
      if (has_right && vn.fanout() + node(siblings[vi + 1]).fanout() <= b) {
        merge_into(parent, vi, io, report);
        continue;
      }
      if (has_left && node(siblings[vi - 1]).fanout() + vn.fanout() <= b) {
        merge_into(parent, vi - 1, io, report);
        continue;
      }
    }
    rebuild_pair(parent, has_right ? vi : vi - 1, io, report);
    force = false;
  }
  // a leaf emptied by the delete and refilled by a repair changes its ancestors' bounds
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    if (!is_live(*it) || node(*it).is_leaf()) continue;
    const auto old_routing = node(*it).child_routing;
    refresh(*it);
    if (node(*it).child_routing != old_routing) touch(*it, io);
  }
  if (force) {
    rebuild_all(io);
    report.actions.push_back({RebalanceKind::kTreeRebuild, height(), root_, NodeId::dummy(),
                              NodeId::dummy()});
  }
  const auto &r = node(root_);
  report.root_underfull = !r.is_leaf() && r.children.size() < 2;
  return report;
}

bool WeightBalancedTree::try_borrow(NodeId parent, std::size_t vi, std::size_t si,
                                    IoCounters &io, EraseReport &report)
{
  const NodeId v = node(parent).children[vi];
  const NodeId s = node(parent).children[si];
  auto &vn = nodes_[v.value];
  auto &sn = nodes_[s.value];
  ++io.classical_node_accesses;
  if (vn.fanout() >= params_.branching || sn.fanout() < 2) return false;
  const std::uint64_t floor = min_weight(vn.height);
  const bool from_right = si > vi;

  if (vn.is_leaf()) {
    if (sn.weight - 1 < floor || vn.weight + 1 < floor) return false;
    if (from_right) {
      vn.pairs.push_back(sn.pairs.front());
      sn.pairs.erase(sn.pairs.begin());
    } else {
      vn.pairs.insert(vn.pairs.begin(), sn.pairs.back());
      sn.pairs.pop_back();
    }
    refresh(v);
    refresh(s);
    report.actions.push_back({RebalanceKind::kBorrow, 0, v, s, NodeId::dummy()});
  } else {
    const NodeId x = from_right ? sn.children.front() : sn.children.back();
    ++io.classical_node_accesses;
    const std::uint64_t wx = node(x).weight;
    if (sn.weight - wx < floor || vn.weight + wx < floor) return false;
    if (from_right) {
      vn.children.push_back(x);
      sn.children.erase(sn.children.begin());
    } else {
      vn.children.insert(vn.children.begin(), x);
      sn.children.pop_back();
    }
    refresh(v);
    refresh(s);
    report.actions.push_back({RebalanceKind::kBorrow, nodes_[v.value].height, v, s, x});
  }
  refresh(parent);
  touch(v, io);
  touch(s, io);
  touch(parent, io);
  return true;
}

void WeightBalancedTree::merge_into(NodeId parent, std::size_t li, IoCounters &io,
                                    EraseReport &report)
{
  const NodeId left = node(parent).children[li];
  const NodeId right = node(parent).children[li + 1];
  auto &ln = nodes_[left.value];
  auto &rn = nodes_[right.value];
  if (ln.is_leaf()) {
    ln.pairs.insert(ln.pairs.end(), rn.pairs.begin(), rn.pairs.end());
  } else {
    ln.children.insert(ln.children.end(), rn.children.begin(), rn.children.end());
  }
  const std::uint32_t h = ln.height;
  refresh(left);
  release_node(right);
  auto &pn = nodes_[parent.value];
  pn.children.erase(pn.children.begin() + static_cast<std::ptrdiff_t>(li + 1));
  refresh(parent);
  touch(left, io);
  touch(parent, io);
  report.actions.push_back({RebalanceKind::kMerge, h, left, right, NodeId::dummy()});
}

void WeightBalancedTree::rebuild_pair(NodeId parent, std::size_t li, IoCounters &io,
                                      EraseReport &report)
{
  const NodeId left = node(parent).children[li];
  const NodeId right = node(parent).children[li + 1];
  const std::uint32_t h = node(left).height;
  auto pairs = collect_pairs(left, &io);
  const auto more = collect_pairs(right, &io);
  pairs.insert(pairs.end(), more.begin(), more.end());
  release_subtree(left);
  release_subtree(right);

  std::vector<NodeId> built;
  const std::span<const KeyRecordPair> all{pairs};
  if (pairs.size() <= capacity(h)) {
    built.push_back(build_subtree(all, h, 1, io));
  } else {
    const std::size_t half = (pairs.size() + 1) / 2;
    built.push_back(build_subtree(all.first(half), h, 1, io));
    built.push_back(build_subtree(all.subspan(half), h, 1, io));
  }
  auto &pn = nodes_[parent.value];
  const auto at = pn.children.begin() + static_cast<std::ptrdiff_t>(li);
  pn.children.erase(at, at + 2);
  pn.children.insert(pn.children.begin() + static_cast<std::ptrdiff_t>(li), built.begin(),
                     built.end());
  refresh(parent);
  touch(parent, io);
  report.actions.push_back({RebalanceKind::kRebuild, h, built.front(),
                            built.size() > 1 ? built.back() : NodeId::dummy(),
                            NodeId::dummy()});
}

void WeightBalancedTree::rebuild_all(IoCounters &io)
{
  const auto pairs = collect_pairs(root_, &io);
  release_subtree(root_);
  if (pairs.empty()) {
    root_ = allocate(0);
    touch(root_, io);
    return;
  }
  const std::uint32_t h = natural_height(pairs.size(), params_);
  root_ = build_subtree(pairs, h, h == 0 ? 1 : 2, io);
}

/*######################################################################################
 * Root surgery
 *####################################################################################*/

void WeightBalancedTree::collapse_root(IoCounters &io)
{
  const auto &r = node(root_);
  if (r.is_leaf() || r.children.size() != 1) {
    throw std::logic_error{"collapse_root needs an internal root with one child"};
  }
  const NodeId old = root_;
  root_ = r.children.front();
  release_node(old);
  ++io.classical_node_accesses;
}

NodeId WeightBalancedTree::graft(const WeightBalancedTree &src, NodeId src_node, IoCounters &io)
{
  const auto copy = [&](auto &&self, NodeId from) -> NodeId {
    const auto &sn = src.node(from);
    ++io.classical_node_accesses;
    const NodeId to = allocate(sn.height);
    if (sn.is_leaf()) {
      nodes_[to.value].pairs = sn.pairs;
    } else {
      for (const auto c : sn.children) {
        const NodeId cc = self(self, c);
        nodes_[to.value].children.push_back(cc);
      }
    }
    refresh(to);
    touch(to, io);
    return to;
  };
  return copy(copy, src_node);
}

void WeightBalancedTree::attach_to_root(NodeId child, IoCounters &io)
{
  auto &r = nodes_[root_.value];
  if (r.is_leaf() || node(child).height + 1 != r.height) {
    throw std::logic_error{"attach_to_root needs a child one level below the root"};
  }
  const Key lo = node(child).routing().lo;
  auto pos = std::find_if(r.child_routing.begin(), r.child_routing.end(),
                          [&](const RoutingKey &k) { return k.lo > lo; });
  r.children.insert(r.children.begin() + (pos - r.child_routing.begin()), child);
  refresh(root_);
  touch(root_, io);
}

void WeightBalancedTree::detach_from_root(std::size_t index, IoCounters &io)
{
  auto &r = nodes_[root_.value];
  const NodeId child = r.children.at(index);
  r.children.erase(r.children.begin() + static_cast<std::ptrdiff_t>(index));
  release_subtree(child);
  refresh(root_);
  touch(root_, io);
}

/*######################################################################################
 * Audits and the baseline query
 *####################################################################################*/

BalanceReport check_balance(const WeightBalancedTree &t)
{
  BalanceReport rep;
  const std::uint64_t b = t.params().branching;
  std::vector<NodeId> stack{t.root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const auto &n = t.node(id);
    const bool is_root = id == t.root();
    const auto fail = [&](const char *what) { rep.violations.push_back(describe(id, what)); };

    if (!t.is_live(id)) {
      fail("referenced but not live");
      continue;
    }
    if (n.fanout() > b) fail("fanout exceeds B");
    std::uint64_t w = 0;
    if (n.is_leaf()) {
      if (!n.children.empty()) fail("leaf with children");
      if (!std::is_sorted(n.pairs.begin(), n.pairs.end())) fail("leaf pairs out of order");
      if (std::any_of(n.pairs.begin(), n.pairs.end(),
                      [](const KeyRecordPair &p) { return p.is_dummy(); })) {
        fail("dummy pair before a real slot");
      }
      w = n.pairs.size();
    } else {
      if (n.children.empty()) fail("internal node without children");
      if (n.child_routing.size() != n.children.size()) fail("routing and child slots differ");
      if (is_root && n.children.size() < 2) fail("internal root with fewer than two children");
      for (std::size_t j = 0; j < n.children.size(); ++j) {
        const NodeId c = n.children[j];
        if (c.is_dummy()) {
          fail("dummy child before a real slot");
          continue;
        }
        if (!t.is_live(c)) {
          fail("child not live");
          continue;
        }
        const auto &cn = t.node(c);
        if (cn.height + 1 != n.height) fail("child height mismatch (leaves on unequal levels)");
        if (j < n.child_routing.size() && !(n.child_routing[j] == cn.routing())) {
          fail("routing key does not match child contents");
        }
        if (j > 0 && j < n.child_routing.size() &&
            n.child_routing[j - 1].hi > n.child_routing[j].lo) {
          fail("sibling routing ranges overlap or are unsorted");
        }
        w += cn.weight;
        stack.push_back(c);
      }
    }
    if (w != n.weight) fail("stored weight differs from contents");

    NodeBalance nb{id, n.height, n.weight, true, true};
    if (!is_root) {
      nb.balanced = n.weight >= t.min_weight(n.height) && n.weight <= t.capacity(n.height);
      nb.perfectly_balanced = nb.balanced && 2 * n.weight >= t.capacity(n.height);
      if (!nb.balanced) fail("weight outside [B^{h+1}/4, B^{h+1}]");
    }
    rep.all_balanced = rep.all_balanced && nb.balanced;
    rep.all_perfectly_balanced = rep.all_perfectly_balanced && nb.perfectly_balanced;
    rep.nodes.push_back(nb);
  }
  std::sort(rep.nodes.begin(), rep.nodes.end(),
            [](const NodeBalance &a, const NodeBalance &b2) { return a.id < b2.id; });
  return rep;
}

std::vector<KeyRecordPair> classical_range_query(const WeightBalancedTree &t,
                                                 const QueryRange &r, IoCounters &io)
{
  std::vector<KeyRecordPair> out;
  const auto visit = [&](auto &&self, NodeId id) -> void {
    ++io.classical_node_accesses;
    const auto &n = t.node(id);
    if (n.is_leaf()) {
      for (const auto &p : n.pairs) {
        if (r.contains(p.key)) out.push_back(p);
      }
      return;
    }
    for (std::size_t j = 0; j < n.children.size(); ++j) {
      if (overlaps(n.child_routing[j], r)) self(self, n.children[j]);
    }
  };
  visit(visit, t.root());
  return out;
}

}  // namespace qbtree

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qbtree/classical_btree.hpp"

namespace qbtree
{
namespace
{
using testing::rec_of;

KeyRecordPair kp(Key k) { return {k, rec_of(k)}; }

WeightBalancedTree figure_tree()
{
  return WeightBalancedTree::from_layout(testing::figure_layout(), validate_params(4));
}

std::vector<KeyRecordPair> sequential(std::size_t n)
{
  std::vector<KeyRecordPair> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(kp(static_cast<Key>(i)));
  return out;
}

std::uint32_t ceil_log(std::uint64_t n, std::uint64_t b)
{
  std::uint32_t h = 0;
  for (std::uint64_t p = 1; p < n; p *= b) ++h;
  return h;
}

TEST(FigureTree, ShapeAndRouting)
{
  const auto t = figure_tree();
  const auto &root = t.node(t.root());
  EXPECT_EQ(t.root(), NodeId{0});
  EXPECT_EQ(root.children, (std::vector<NodeId>{NodeId{1}, NodeId{2}, NodeId{3}}));
  EXPECT_EQ(root.child_routing[0], (RoutingKey{1, 6}));
  EXPECT_EQ(root.child_routing[1], (RoutingKey{8, 21}));
  EXPECT_EQ(root.child_routing[2], (RoutingKey{25, 35}));
  EXPECT_EQ(t.node(NodeId{2}).child_routing[0], (RoutingKey{8, 10}));
  EXPECT_EQ(t.node(NodeId{10}).pairs.front(), kp(33));
  EXPECT_EQ(t.size(), 14u);
}

TEST(CheckBalance, FigureNodeOneIsBalancedButNotPerfect)
{
  const auto rep = check_balance(figure_tree());
  EXPECT_TRUE(rep.ok()) << rep.violations.front();
  const auto *n1 = rep.find(NodeId{1});
  ASSERT_NE(n1, nullptr);
  EXPECT_EQ(n1->weight, 4u);
  EXPECT_TRUE(n1->balanced);
  EXPECT_FALSE(n1->perfectly_balanced);
}

TEST(CheckBalance, WeightThreeAtHeightOneIsImbalanced)
{
  LayoutNode root;
  LayoutNode light;
  light.children.resize(2);
  light.children[0].pairs = {kp(1), kp(2)};
  light.children[1].pairs = {kp(3)};
  LayoutNode heavy;
  heavy.children.resize(2);
  heavy.children[0].pairs = {kp(4), kp(5), kp(6)};
  heavy.children[1].pairs = {kp(7), kp(8)};
  root.children = {light, heavy};
  const auto t = WeightBalancedTree::from_layout(root, validate_params(4));
  const auto rep = check_balance(t);
  EXPECT_FALSE(rep.ok());
  EXPECT_FALSE(rep.find(NodeId{1})->balanced);
  EXPECT_TRUE(rep.find(NodeId{2})->balanced);
}

TEST(CheckBalance, CatchesCorruptedBookkeeping)
{
  auto t = figure_tree();
  t.mutable_node(NodeId{2}).weight = 99;
  EXPECT_FALSE(check_balance(t).ok());
  auto u = figure_tree();
  u.mutable_node(NodeId{0}).child_routing[1] = RoutingKey{0, 30};
  EXPECT_FALSE(check_balance(u).ok());
}

TEST(BulkLoad, FourteenPairs)
{
  IoCounters io;
  const auto t = WeightBalancedTree::bulk_load(make_dataset(sequential(14)), validate_params(4), io);
  // the closed-form leaf count for N = 14, B = 4 is ceil(14/4) * 4^0 = 4
  EXPECT_EQ(t.height(), 1u);
  EXPECT_EQ(t.node(t.root()).children.size(), 4u);
  EXPECT_EQ(t.node(t.root()).children.front(), NodeId{1});
  EXPECT_EQ(io.classical_node_accesses, t.node_count());
  const auto rep = check_balance(t);
  EXPECT_TRUE(rep.ok());
  EXPECT_TRUE(rep.all_perfectly_balanced);
}

TEST(BulkLoad, SmallAndFullTrees)
{
  IoCounters io;
  const auto p = validate_params(4);
  const auto single = WeightBalancedTree::bulk_load(make_dataset(sequential(4)), p, io);
  EXPECT_EQ(single.height(), 0u);
  EXPECT_EQ(single.node_count(), 1u);
  const auto full = WeightBalancedTree::bulk_load(make_dataset(sequential(16)), p, io);
  EXPECT_EQ(full.height(), 1u);
  for (const auto c : full.node(full.root()).children) EXPECT_EQ(full.node(c).weight, 4u);
  EXPECT_THROW(WeightBalancedTree::bulk_load(Dataset{}, p, io), Error);
}

void expect_perfect_build(std::uint64_t n, std::uint64_t b)
{
  IoCounters io;
  const auto t = WeightBalancedTree::bulk_load(sequential(n), validate_params(b), io);
  const auto rep = check_balance(t);
  ASSERT_TRUE(rep.ok()) << "N=" << n << " B=" << b << ": " << rep.violations.front();
  ASSERT_TRUE(rep.all_perfectly_balanced) << "N=" << n << " B=" << b;
  std::uint64_t leaves = 0;
  for (const auto &nb : rep.nodes) leaves += nb.height == 0 ? 1 : 0;
  ASSERT_EQ(leaves, testing::expected_leaf_count(n, b)) << "N=" << n << " B=" << b;
  ASSERT_LE(t.height(), ceil_log(n, b) + 1) << "N=" << n << " B=" << b;
  ASSERT_EQ(t.size(), n);
}

TEST(BulkLoad, BalanceSweepSmallN)
{
  for (const std::uint64_t b : {4, 8, 16, 32, 64}) {
    for (std::uint64_t n = 1; n <= 2000; ++n) expect_perfect_build(n, b);
  }
}

TEST(BulkLoad, BalanceSweepSampledLargeN)
{
  Rng rng{5};
  for (const std::uint64_t b : {4, 8, 16, 32, 64}) {
    for (int i = 0; i < 40; ++i) expect_perfect_build(2001 + rng.below(98000), b);
    // boundaries around powers of B
    for (std::uint64_t p = b; p <= 100000; p *= b) {
      for (const std::uint64_t n : {p - 1, p, p + 1}) expect_perfect_build(n, b);
    }
  }
  expect_perfect_build(100000, 16);
}

TEST(ClassicalRangeQuery, FigureAndEdges)
{
  const auto t = figure_tree();
  IoCounters io;
  EXPECT_EQ(classical_range_query(t, make_range(5, 11), io),
            (std::vector<KeyRecordPair>{kp(6), kp(8), kp(10)}));
  EXPECT_TRUE(classical_range_query(t, make_range(100, 200), io).empty());
  io.reset();
  EXPECT_EQ(classical_range_query(t, make_range(-100, 100), io).size(), 14u);
  EXPECT_EQ(io.classical_node_accesses, t.node_count());
}

TEST(ClassicalRangeQuery, MatchesBruteForce)
{
  Rng rng{17};
  for (int trial = 0; trial < 300; ++trial) {
    const auto b = std::uint64_t{4} << rng.below(3);
    const auto pairs = testing::random_pairs(rng, 1 + rng.below(600), 1 + rng.below(1000));
    const auto d = make_dataset(pairs);
    IoCounters io;
    const auto t = WeightBalancedTree::bulk_load(d, validate_params(b), io);
    for (int q = 0; q < 5; ++q) {
      const auto r = testing::random_range(rng, -10, 1010);
      ASSERT_EQ(classical_range_query(t, r, io), testing::brute_force(d.pairs(), r));
    }
  }
}

TEST(Erase, FigureBorrowsNodeSixFromNodeTwo)
{
  auto t = figure_tree();
  IoCounters io;
  const auto rep = t.erase(kp(6), io);
  ASSERT_EQ(rep.actions.size(), 1u);
  const auto &a = rep.actions.front();
  EXPECT_EQ(a.kind, RebalanceKind::kBorrow);
  EXPECT_EQ(a.receiver, NodeId{1});
  EXPECT_EQ(a.donor, NodeId{2});
  EXPECT_EQ(a.moved, NodeId{6});
  EXPECT_EQ(t.node(NodeId{1}).weight, 5u);
  EXPECT_EQ(t.node(NodeId{2}).weight, 4u);
  const auto bal = check_balance(t);
  EXPECT_TRUE(bal.ok()) << bal.violations.front();
}

TEST(Erase, FigureRebuildsWhenBorrowAndMergeFail)
{
  auto t = figure_tree();
  IoCounters io;
  const auto rep = t.erase(kp(27), io);
  ASSERT_EQ(rep.actions.size(), 1u);
  EXPECT_EQ(rep.actions.front().kind, RebalanceKind::kRebuild);
  const auto &root = t.node(t.root());
  ASSERT_EQ(root.children.size(), 2u);
  const auto &rebuilt = t.node(root.children[1]);
  EXPECT_EQ(rebuilt.weight, 9u);
  EXPECT_EQ(rebuilt.children.size(), 3u);
  const auto bal = check_balance(t);
  EXPECT_TRUE(bal.ok()) << bal.violations.front();
  EXPECT_FALSE(rep.root_underfull);
}

TEST(Erase, MissingPairIsNotFound)
{
  auto t = figure_tree();
  IoCounters io;
  try {
    t.erase(kp(7), io);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

TEST(Erase, RandomDeletionsKeepBalance)
{
  Rng rng{31};
  for (int trial = 0; trial < 150; ++trial) {
    const auto b = std::uint64_t{4} << rng.below(3);
    auto live = testing::random_pairs(rng, 1 + rng.below(700), 1 + rng.below(500));
    IoCounters io;
    auto t = WeightBalancedTree::bulk_load(make_dataset(live), validate_params(b), io);
    while (live.size() > 1) {
      const auto idx = rng.below(live.size());
      const auto victim = live[idx];
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
      const auto rep = t.erase(victim, io);
      if (rep.root_underfull) {
        while (!t.node(t.root()).is_leaf() && t.node(t.root()).children.size() == 1) {
          t.collapse_root(io);
        }
      }
      const auto bal = check_balance(t);
      ASSERT_TRUE(bal.ok()) << "B=" << b << " n=" << live.size() << ": "
                            << bal.violations.front();
      auto sorted = live;
      std::sort(sorted.begin(), sorted.end());
      ASSERT_EQ(t.collect_pairs(), sorted);
    }
  }
}

}  // namespace
}  // namespace qbtree

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "oracles.hpp"
#include "qbtree/quantum_range_tree.hpp"

namespace qbtree
{
namespace
{
std::vector<PointRecord> grid(Key side)
{
  std::vector<PointRecord> pts;
  for (Key x = 0; x < side; ++x) {
    for (Key y = 0; y < side; ++y) {
      pts.push_back({{x, y}, RecordHandle{pts.size()}});
    }
  }
  return pts;
}

std::uint64_t ceil_log(std::uint64_t n, std::uint64_t b)
{
  std::uint64_t h = 0;
  for (std::uint64_t p = 1; p < n; p *= b) ++h;
  return h;
}

bool uniform(const QueryResult &res)
{
  if (!res.state) return true;
  const auto &e = res.state->entries();
  return std::all_of(e.begin(), e.end(), [&](const auto &x) { return x.second == e.front().second; });
}

TEST(Canonical, FullAndEmpty)
{
  IoCounters io;
  std::vector<KeyRecordPair> pairs;
  for (Key k = 0; k < 64; ++k) pairs.push_back({k, RecordHandle{static_cast<std::uint64_t>(k)}});
  const auto t = WeightBalancedTree::bulk_load(pairs, validate_params(4), io);
  EXPECT_EQ(canonical_nodes(t, make_range(-5, 100), io),
            (CanonicalSet{{t.root(), CoverKind::kSubtree}}));
  EXPECT_TRUE(canonical_nodes(t, make_range(70, 80), io).empty());
}

TEST(Canonical, DisjointExactCoverExhaustive)
{
  Rng rng{8};
  for (const std::uint64_t b : {4u, 8u}) {
    IoCounters io;
    auto pairs = testing::random_pairs(rng, 150, 40);
    std::sort(pairs.begin(), pairs.end());
    const auto t = WeightBalancedTree::bulk_load(pairs, validate_params(b), io);
    for (Key lo = -1; lo <= 41; ++lo) {
      for (Key hi = lo; hi <= 41; ++hi) {
        const auto r = make_range(lo, hi);
        std::vector<KeyRecordPair> got;
        for (const auto &c : canonical_nodes(t, r, io)) {
          for (const auto &p : t.collect_pairs(c.node)) {
            if (c.kind == CoverKind::kSubtree || r.contains(p.key)) got.push_back(p);
          }
          if (c.kind == CoverKind::kSubtree) {
            const auto rt = t.node(c.node).routing();
            EXPECT_TRUE(r.contains(rt.lo) && r.contains(rt.hi));
          } else {
            EXPECT_TRUE(t.node(c.node).is_leaf());
          }
        }
        const std::size_t n = got.size();
        std::sort(got.begin(), got.end());
        EXPECT_EQ(std::unique(got.begin(), got.end()) - got.begin(),
                  static_cast<std::ptrdiff_t>(n));
        EXPECT_EQ(got, testing::brute_force(pairs, r));
      }
    }
  }
}

TEST(Build, Errors)
{
  IoCounters io;
  const auto params = validate_params(4);
  try {
    (void)QuantumRangeTree::build({}, params, io);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDataset);
  }
  try {
    (void)QuantumRangeTree::build({{{1, 2}, RecordHandle{0}}, {{1}, RecordHandle{1}}}, params, io);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Build, OneDimensionIsQuantumBPlusTree)
{
  Rng rng{3};
  IoCounters io;
  const auto params = validate_params(4);
  const auto pts = testing::random_points(rng, 90, 1, 200);
  const auto rt = QuantumRangeTree::build(pts, params, io);
  std::vector<KeyRecordPair> pairs;
  for (std::uint64_t i = 0; i < pts.size(); ++i) pairs.push_back({pts[i].key[0], RecordHandle{i}});
  std::sort(pairs.begin(), pairs.end());
  const auto qt = QuantumBPlusTree::build(pairs, params, io);
  EXPECT_EQ(rt.top().tree.tree().collect_pairs(), qt.tree().collect_pairs());
  for (int q = 0; q < 50; ++q) {
    const auto box = testing::random_box(rng, 1, 0, 199);
    const auto a = rt.query(box, EvalMode::kAnalytic, nullptr, io);
    const auto b = query(qt, box.dims[0], EvalMode::kAnalytic, nullptr, io);
    EXPECT_EQ(a.support(), b.support());
    EXPECT_EQ(a.success_probability, b.success_probability);
    EXPECT_EQ(rt.resolve(a), testing::brute_force(pts, box));
  }
}

TEST(Build, TwoDimensionalStructure)
{
  IoCounters io;
  Rng rng{16};
  const auto pts = testing::random_points(rng, 16, 2, 50);
  const auto rt = QuantumRangeTree::build(pts, validate_params(4), io);
  const auto bad = rt.audit();
  EXPECT_TRUE(bad.empty()) << (bad.empty() ? "" : bad.front());

  const auto &t = rt.top().tree.tree();
  ASSERT_EQ(t.height(), 1u);
  std::size_t secondaries = 0;
  for (std::size_t id = 0; id < rt.top().secondary.size(); ++id) {
    if (rt.top().secondary[id]) ++secondaries;
  }
  EXPECT_EQ(secondaries, 1u);
  EXPECT_EQ(rt.top().secondary[t.root().value]->tree.size(), 16u);
}

TEST(Build, SecondaryPairsPerHeightSumToN)
{
  IoCounters io;
  Rng rng{21};
  const auto pts = testing::random_points(rng, 700, 2, 5000);
  const auto rt = QuantumRangeTree::build(pts, validate_params(4), io);
  EXPECT_TRUE(rt.audit().empty());
  const auto &t = rt.top().tree.tree();
  std::map<std::uint32_t, std::uint64_t> per_height;
  for (const auto id : t.live_nodes()) {
    if (!t.node(id).is_leaf()) per_height[t.node(id).height] += rt.top().secondary[id.value]->tree.size();
  }
  EXPECT_EQ(per_height.size(), t.height());
  for (const auto &[h, n] : per_height) EXPECT_EQ(n, 700u) << "height " << h;
}

TEST(Query, GridPointIsSingleton)
{
  IoCounters io;
  const auto pts = grid(16);
  const auto rt = QuantumRangeTree::build(pts, validate_params(4), io);
  const Key lo[] = {5, 7};
  const auto res = rt.query(make_box(lo, lo), EvalMode::kAnalytic, nullptr, io);
  const auto got = rt.resolve(res);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got.front().key, (Point{5, 7}));
}

TEST(Query, EmptyAndFull)
{
  IoCounters io;
  const auto pts = grid(10);
  const auto rt = QuantumRangeTree::build(pts, validate_params(4), io);
  const Key lo[] = {20, 0};
  const Key hi[] = {30, 9};
  EXPECT_EQ(rt.query(make_box(lo, hi), EvalMode::kAnalytic, nullptr, io).kind, ResultKind::kEmpty);
  EXPECT_TRUE(rt.classical_query(make_box(lo, hi), io).empty());

  const Key flo[] = {0, 0};
  const Key fhi[] = {9, 9};
  const auto all = rt.query(make_box(flo, fhi), EvalMode::kAnalytic, nullptr, io);
  EXPECT_EQ(all.support().size(), 100u);
  EXPECT_EQ(rt.classical_query(make_box(flo, fhi), io).size(), 100u);
}

TEST(Query, RandomTwoDimensionalMatchesOracle)
{
  Rng rng{2};
  for (int inst = 0; inst < 500; ++inst) {
    const std::uint64_t b = 4u << rng.below(3);
    const auto n = 1 + rng.below(256);
    const auto span = 8 + rng.below(500);
    IoCounters io;
    const auto pts = testing::random_points(rng, n, 2, span);
    const auto rt = QuantumRangeTree::build(pts, validate_params(b), io);
    const auto box = testing::random_box(rng, 2, 0, static_cast<Key>(span));
    const auto expect = testing::brute_force(pts, box);
    io.reset();
    const auto res = rt.query(box, EvalMode::kAnalytic, nullptr, io);
    ASSERT_EQ(rt.resolve(res), expect) << "instance " << inst;
    EXPECT_TRUE(uniform(res));
    if (res.kind == ResultKind::kSuperposition) {
      EXPECT_LE(res.cost.attempts.to_double(), 8.0 * static_cast<double>(b));
      const double bound = 10.0 * static_cast<double>(b) *
                           static_cast<double>((ceil_log(n, b) + 1) * (ceil_log(n, b) + 1));
      EXPECT_LE(res.cost.io(), bound);
    }
    IoCounters cio;
    EXPECT_EQ(rt.classical_query(box, cio), expect);
  }
}

TEST(Query, ThreeDimensionalMatchesOracle)
{
  Rng rng{33};
  for (int inst = 0; inst < 60; ++inst) {
    IoCounters io;
    const auto pts = testing::random_points(rng, 1 + rng.below(200), 3, 40);
    const auto rt = QuantumRangeTree::build(pts, validate_params(4), io);
    EXPECT_TRUE(rt.audit().empty());
    const auto box = testing::random_box(rng, 3, 0, 40);
    const auto res = rt.query(box, EvalMode::kAnalytic, nullptr, io);
    EXPECT_EQ(rt.resolve(res), testing::brute_force(pts, box));
    EXPECT_TRUE(uniform(res));
    EXPECT_EQ(rt.classical_query(box, io), testing::brute_force(pts, box));
  }
}

TEST(Query, StochasticMatchesOracle)
{
  Rng rng{44};
  IoCounters io;
  const auto pts = testing::random_points(rng, 250, 2, 300);
  const auto rt = QuantumRangeTree::build(pts, validate_params(8), io);
  for (int q = 0; q < 40; ++q) {
    const auto box = testing::random_box(rng, 2, 0, 300);
    Rng qr{Rng::derive_seed(44, static_cast<std::uint64_t>(q))};
    const auto res = rt.query(box, EvalMode::kStochastic, &qr, io);
    EXPECT_EQ(rt.resolve(res), testing::brute_force(pts, box));
  }
}

TEST(Query, ClassicalIoGrowsWithOutput)
{
  IoCounters io;
  const auto pts = grid(64);
  const auto rt = QuantumRangeTree::build(pts, validate_params(4), io);
  const Key lo[] = {0, 0};
  const Key small_hi[] = {7, 7};
  const Key big_hi[] = {63, 63};
  IoCounters a;
  IoCounters b;
  (void)rt.classical_query(make_box(lo, small_hi), a);
  (void)rt.classical_query(make_box(lo, big_hi), b);
  EXPECT_GT(b.classical_node_accesses, 20 * a.classical_node_accesses);
  IoCounters q;
  const auto res = rt.query(make_box(lo, big_hi), EvalMode::kAnalytic, nullptr, q);
  EXPECT_LT(res.cost.io(), static_cast<double>(b.classical_node_accesses));
}

}  // namespace
}  // namespace qbtree

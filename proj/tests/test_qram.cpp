#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qbtree/qram.hpp"

namespace qbtree
{
namespace
{
TEST(Qram, StoreThenPeek)
{
  Qram q;
  IoCounters io;
  q.store(address_of(NodeId{0}, 0, 4), NodeId{1}, io);
  q.store(address_of(NodeId{0}, 3, 4), DummyValue{}, io);
  EXPECT_EQ(q.peek(0), QramValue{NodeId{1}});
  EXPECT_EQ(q.peek(3), QramValue{DummyValue{}});
  EXPECT_EQ(q.peek(1000), QramValue{DummyValue{}});
  EXPECT_EQ(io.qram_stores, 2u);
  EXPECT_EQ(io.total_io(), 2u);
}

TEST(Qram, DummyBlockIsReserved)
{
  Qram q;
  IoCounters io;
  const Address a = address_of(NodeId::dummy(), 2, 4);
  EXPECT_EQ(q.peek(a), QramValue{DummyValue{}});
  EXPECT_THROW(q.store(a, NodeId{1}, io), Error);
}

TEST(Qram, LoadPreservesWeightsAndCountsOnce)
{
  Qram q;
  IoCounters io;
  q.store(40, KeyRecordPair{33, RecordHandle{33}}, io);
  const auto addrs = uniform_init<Address>(std::vector<Address>{40, 41, 42, 43});
  const auto out = q.load_superposed(addrs, io);
  EXPECT_EQ(io.qram_loads, 1u);
  EXPECT_EQ(out.total(), 4u);
  EXPECT_EQ(out.weight_of({40, KeyRecordPair{33, RecordHandle{33}}}), 1u);
  EXPECT_EQ(out.weight_of({41, DummyValue{}}), 1u);

  const auto skew = WeightedState<Address>::from_entries({{40, 2}, {41, 1}});
  const auto loaded = q.load_superposed(skew, io);
  EXPECT_EQ(loaded.total(), 3u);
  EXPECT_EQ(loaded.weight_of({40, KeyRecordPair{33, RecordHandle{33}}}), 2u);
}

TEST(Qram, OneLoadPerSuperpositionProperty)
{
  Rng rng{7};
  Qram q;
  IoCounters io;
  for (Address a = 0; a < 256; ++a) q.store(a, NodeId{a}, io);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = 1 + rng.below(300);
    std::vector<std::pair<Address, Weight>> entries;
    for (std::uint64_t i = 0; i < s; ++i) entries.emplace_back(rng.below(512), 1 + rng.below(9));
    const auto addrs = WeightedState<Address>::from_entries(entries);
    const auto before = io.qram_loads;
    const auto out = q.load_superposed(addrs, io);
    ASSERT_EQ(io.qram_loads, before + 1);
    ASSERT_EQ(out.total(), addrs.total());
  }
}

TEST(Qram, XorLoadIsAnInvolution)
{
  Qram q;
  IoCounters io;
  q.store(5, KeyRecordPair{-3, RecordHandle{9}}, io);
  q.store(6, RoutingKey{1, 6}, io);
  Rng rng{11};
  for (Address a = 0; a < 10; ++a) {
    const QramWord zero{};
    EXPECT_EQ(q.xor_load(a, zero, io), encode(q.peek(a)));
    const QramWord reg{rng.below(~0ULL), rng.below(~0ULL), rng.below(~0ULL)};
    EXPECT_EQ(q.xor_load(a, q.xor_load(a, reg, io), io), reg);
    EXPECT_EQ(q.xor_load(a, encode(q.peek(a)), io), zero);
  }
}

TEST(QramBank, SpansSeveralMemoriesInOneLoad)
{
  Qram a;
  Qram b;
  IoCounters io;
  a.store(0, NodeId{7}, io);
  b.store(0, NodeId{8}, io);
  QramBank bank;
  EXPECT_EQ(bank.add(a), 0u);
  EXPECT_EQ(bank.add(b), 1u);
  const auto addrs =
      uniform_init<BankAddress>(std::vector<BankAddress>{{0, 0}, {1, 0}, {1, 1}});
  io.reset();
  const auto out = bank.load_superposed(addrs, io);
  EXPECT_EQ(io.qram_loads, 1u);
  EXPECT_EQ(out.weight_of({{0, 0}, NodeId{7}}), 1u);
  EXPECT_EQ(out.weight_of({{1, 0}, NodeId{8}}), 1u);
  EXPECT_EQ(out.weight_of({{1, 1}, DummyValue{}}), 1u);
}

}  // namespace
}  // namespace qbtree

#include <gtest/gtest.h>

#include "qbtree/core.hpp"
#include "qbtree/metrics.hpp"

namespace qbtree
{
namespace
{
ErrorCode code_of(auto &&fn)
{
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no qbtree::Error thrown";
  return ErrorCode::kInvalidConfig;
}

TEST(ValidateParams, AcceptsPowersOfTwo)
{
  const auto four = validate_params(4);
  EXPECT_EQ(four.branching, 4u);
  EXPECT_EQ(four.log2_branching, 2u);
  const auto sixteen = validate_params(16);
  EXPECT_EQ(sixteen.branching, 16u);
  EXPECT_EQ(sixteen.log2_branching, 4u);
}

TEST(ValidateParams, RejectsBadBranching)
{
  EXPECT_EQ(code_of([] { validate_params(6); }), ErrorCode::kNotPowerOfTwo);
  EXPECT_EQ(code_of([] { validate_params(0); }), ErrorCode::kNotPowerOfTwo);
  EXPECT_EQ(code_of([] { validate_params(2); }), ErrorCode::kTooSmall);
}

TEST(TreeParams, PowIsExact)
{
  const auto p = validate_params(16);
  EXPECT_EQ(p.pow(0), 1u);
  EXPECT_EQ(p.pow(3), 4096u);
  EXPECT_THROW((void)p.pow(16), std::overflow_error);
}

TEST(MakeDataset, SortsPairs)
{
  const auto d = make_dataset({{2, RecordHandle{2}}, {1, RecordHandle{1}}});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.pairs()[0].key, 1);
  EXPECT_EQ(d.pairs()[1].key, 2);
  EXPECT_TRUE(make_dataset({}).empty());
}

TEST(MakeDataset, RejectsDuplicatesAndDummyKey)
{
  EXPECT_EQ(code_of([] { make_dataset({{1, RecordHandle{1}}, {1, RecordHandle{1}}}); }),
            ErrorCode::kDuplicatePair);
  EXPECT_EQ(code_of([] { make_dataset({{kDummyKey, RecordHandle{1}}}); }),
            ErrorCode::kInvalidKey);
  // equal keys with distinct records are fine
  EXPECT_EQ(make_dataset({{1, RecordHandle{1}}, {1, RecordHandle{2}}}).size(), 2u);
}

TEST(MakeRange, ValidatesOrder)
{
  const auto r = make_range(5, 11);
  EXPECT_TRUE(r.contains(5));
  EXPECT_TRUE(r.contains(11));
  EXPECT_FALSE(r.contains(12));
  EXPECT_TRUE(make_range(7, 7).contains(7));
  EXPECT_EQ(code_of([] { make_range(9, 3); }), ErrorCode::kInvertedRange);
}

TEST(Dummy, SortsAfterEveryRealPair)
{
  const KeyRecordPair biggest{kDummyKey - 1, RecordHandle{~std::uint64_t{0}}};
  EXPECT_LT(biggest, KeyRecordPair::dummy());
  EXPECT_TRUE(KeyRecordPair::dummy().is_dummy());
}

TEST(Box, ContainsChecksEveryDimension)
{
  const std::vector<Key> lo{0, 10};
  const std::vector<Key> hi{5, 20};
  const auto box = make_box(lo, hi);
  EXPECT_TRUE(box.contains({3, 15}));
  EXPECT_FALSE(box.contains({3, 25}));
  EXPECT_FALSE(box.contains({3}));
  const std::vector<Key> one{1};
  EXPECT_EQ(code_of([&] { make_box(one, hi); }), ErrorCode::kDimensionMismatch);
}

TEST(IoCounters, ResetAndSnapshot)
{
  IoCounters io{3, 1, 2, 5};
  const auto snap = io.snapshot();
  io.qram_loads += 4;
  EXPECT_EQ(snap.qram_loads, 3u);
  io.reset();
  io.reset();
  EXPECT_EQ(io, IoCounters{});
  ++io.qram_loads;
  EXPECT_EQ(io.total_io(), 1u);
  EXPECT_EQ(IoCounters{}.snapshot(), IoCounters{});
}

TEST(IoCounters, TotalExcludesAttempts)
{
  const IoCounters io{1, 2, 3, 100};
  EXPECT_EQ(io.total_io(), 6u);
  EXPECT_EQ(io.since(IoCounters{1, 1, 1, 1}), (IoCounters{0, 1, 2, 99}));
}

}  // namespace
}  // namespace qbtree

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "qbtree/bench.hpp"

namespace qbtree::bench
{
namespace
{
const std::string kData = QBTREE_TEST_DATA_DIR;

ErrorCode code_of(const std::function<void()> &f)
{
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidConfig;
}

TEST(Timestamp, KnownEpochs)
{
  EXPECT_EQ(parse_timestamp("2010-10-19T23:55:27Z"), 1287532527);
  EXPECT_EQ(parse_timestamp("1970-01-02T00:00:01Z"), 86401);
  EXPECT_EQ(parse_timestamp("2000-02-29T12:00:00"), 951825600);
  EXPECT_EQ(parse_timestamp("2001-02-29T12:00:00Z"), std::nullopt);
  EXPECT_EQ(parse_timestamp("2010-10-19 23:55:27"), std::nullopt);
  EXPECT_EQ(parse_timestamp("yesterday"), std::nullopt);
}

TEST(Ingest, TimestampKeys)
{
  const auto d = ingest_checkins(kData + "/checkins_small.tsv", KeyMode::kTimestamp, {}, 1);
  ASSERT_EQ(d.pairs.size(), 3u);
  EXPECT_EQ(d.pairs[0], (KeyRecordPair{86401, RecordHandle{3}}));
  EXPECT_EQ(d.pairs[1], (KeyRecordPair{1287440263, RecordHandle{2}}));
  EXPECT_EQ(d.pairs[2], (KeyRecordPair{1287532527, RecordHandle{1}}));
  EXPECT_FALSE(d.short_file);
}

TEST(Ingest, LocationKeys)
{
  const auto d = ingest_checkins(kData + "/checkins_small.tsv", KeyMode::kLocation2d, {}, 1);
  ASSERT_EQ(d.points.size(), 3u);
  EXPECT_EQ(d.points[0].key, (Point{302359, -977951}));
  EXPECT_EQ(d.points[2].key, (Point{-335000, 1512500}));
  EXPECT_EQ(d.points[2].rec, RecordHandle{3});
}

TEST(Ingest, MalformedLineNamesLine)
{
  const std::string path = ::testing::TempDir() + "bad_checkins.tsv";
  {
    std::ofstream f{path};
    f << "u1\t2010-10-19T23:55:27Z\t1.0\t2.0\t3\n";
    f << "u1\tnot-a-time\t1.0\t2.0\t3\n";
  }
  try {
    (void)ingest_checkins(path, KeyMode::kTimestamp, {}, 1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string{e.what()}.find("line 2"), std::string::npos);
  }
  std::remove(path.c_str());
}

TEST(Ingest, MissingFile)
{
  EXPECT_EQ(code_of([] { (void)ingest_checkins("/nonexistent/x.tsv", KeyMode::kTimestamp, {}, 1); }),
            ErrorCode::kFileNotFound);
}

TEST(Ingest, ShortFileAndSubsample)
{
  const auto all = ingest_checkins(kData + "/checkins_small.tsv", KeyMode::kTimestamp, 10, 1);
  EXPECT_EQ(all.pairs.size(), 3u);
  EXPECT_TRUE(all.short_file);
  const auto a = ingest_checkins(kData + "/checkins_small.tsv", KeyMode::kTimestamp, 2, 9);
  const auto b = ingest_checkins(kData + "/checkins_small.tsv", KeyMode::kTimestamp, 2, 9);
  EXPECT_EQ(a.pairs.size(), 2u);
  EXPECT_EQ(a.pairs, b.pairs);
  EXPECT_TRUE(std::is_sorted(a.pairs.begin(), a.pairs.end()));
}

TEST(Synthetic, DistinctSortedDeterministic)
{
  const auto a = synthetic_pairs(5000, 4);
  EXPECT_EQ(a, synthetic_pairs(5000, 4));
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  std::set<Key> keys;
  for (const auto &p : a) keys.insert(p.key);
  EXPECT_EQ(keys.size(), a.size());
}

TEST(Queries, FullSelectivityCoversDomain)
{
  const auto pairs = synthetic_pairs(300, 2);
  std::vector<Key> keys;
  for (const auto &p : pairs) keys.push_back(p.key);
  for (const auto &q : gen_queries(keys, 1.0, 5, 3)) {
    EXPECT_EQ(q, make_range(keys.front(), keys.back()));
  }
}

TEST(Queries, RankWindowSelectsExactlyK)
{
  const auto pairs = synthetic_pairs(1000, 5);
  std::vector<Key> keys;
  for (const auto &p : pairs) keys.push_back(p.key);
  const auto qs = gen_queries(keys, 0.05, 200, 8);
  ASSERT_EQ(qs.size(), 200u);
  for (const auto &q : qs) EXPECT_EQ(testing::brute_force(pairs, q).size(), 50u);
  EXPECT_EQ(qs, gen_queries(keys, 0.05, 200, 8));
  EXPECT_NE(qs, gen_queries(keys, 0.05, 200, 9));
}

TEST(Queries, BadSelectivity)
{
  const std::vector<Key> keys{1, 2, 3};
  EXPECT_EQ(code_of([&] { (void)gen_queries(keys, 0.0, 1, 1); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of([&] { (void)gen_queries(keys, 1.5, 1, 1); }), ErrorCode::kInvalidConfig);
}

TEST(Queries, BoxesUseRootSelectivityPerDimension)
{
  const auto pts = synthetic_points(400, 2, 6);
  for (const auto &box : gen_boxes(pts, 0.04, 50, 2)) {
    ASSERT_EQ(box.dims.size(), 2u);
    for (std::size_t d = 0; d < 2; ++d) {
      std::size_t in = 0;
      for (const auto &p : pts) in += box.dims[d].contains(p.key[d]) ? 1 : 0;
      EXPECT_GE(in, 80u);
    }
  }
}

std::string csv_of(const ExperimentConfig &cfg)
{
  const auto rows = run_experiment(cfg);
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

TEST(Experiment, StaticQuantumBeatsClassical)
{
  ExperimentConfig cfg;
  cfg.n = 4096;
  cfg.query_count = 100;
  const auto rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].structure, "quantum_bptree");
  EXPECT_EQ(rows[1].structure, "classical_bptree");
  EXPECT_LT(*rows[0].mean_query_io * 2, *rows[1].mean_query_io);
  EXPECT_TRUE(rows[0].mean_attempts.has_value());
  EXPECT_FALSE(rows[1].mean_attempts.has_value());
}

TEST(Experiment, CsvShapeAndDeterminism)
{
  ExperimentConfig cfg;
  cfg.n = 1000;
  cfg.query_count = 30;
  cfg.seed = 42;
  const auto a = csv_of(cfg);
  EXPECT_EQ(a, csv_of(cfg));
  std::istringstream in{a};
  std::string header;
  std::string row;
  std::getline(in, header);
  EXPECT_EQ(header, kCsvHeader);
  std::getline(in, row);
  EXPECT_EQ(row.rfind("quantum_bptree,1000,16,0.0500,", 0), 0u) << row;
  EXPECT_NE(row.find(",,,42"), std::string::npos) << row;
}

TEST(Experiment, DynamicRowsCarryUpdateCosts)
{
  ExperimentConfig cfg;
  cfg.mode = Mode::kDynamic;
  cfg.n = 3000;
  cfg.query_count = 30;
  const auto rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_TRUE(rows[0].mean_insert_io && rows[1].mean_insert_io);
  EXPECT_GT(*rows[0].mean_insert_io, *rows[1].mean_insert_io);
  EXPECT_TRUE(rows[0].mean_delete_io.has_value());
}

TEST(Experiment, Range2dRows)
{
  ExperimentConfig cfg;
  cfg.mode = Mode::kRange2d;
  cfg.n = 128000;
  cfg.query_count = 20;
  const auto rows = run_experiment(cfg);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].structure, "quantum_range_tree");
  EXPECT_LT(*rows[0].mean_query_io, *rows[1].mean_query_io);
}

TEST(Experiment, InvalidConfig)
{
  ExperimentConfig cfg;
  cfg.query_count = 0;
  EXPECT_EQ(code_of([&] { (void)run_experiment(cfg); }), ErrorCode::kInvalidConfig);
  cfg.query_count = 1;
  cfg.branching = 6;
  EXPECT_EQ(code_of([&] { (void)run_experiment(cfg); }), ErrorCode::kNotPowerOfTwo);
}

TEST(Sweeps, SmallRunsAreClean)
{
  const auto s = static_sweep(3, 120, 200, 10.0);
  EXPECT_EQ(s.support_mismatches + s.nonuniform + s.too_many_candidates + s.sparse, 0u);
  EXPECT_GT(s.quantum_paths, 0u);
  const auto d = dynamic_workload(3, 2000, 8, 500, 20);
  EXPECT_EQ(d.dirty_audits, 0u) << d.first_violation;
  EXPECT_EQ(d.query_mismatches, 0u);
  const auto r = range_sweep(3, 60, 100, 10.0);
  EXPECT_EQ(r.support_mismatches + r.classical_mismatches + r.nonuniform + r.audit_failures, 0u);
}

}  // namespace
}  // namespace qbtree::bench

#ifndef QBTREE_BENCH_HPP
#define QBTREE_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbtree/core.hpp"
#include "qbtree/quantum_btree.hpp"

namespace qbtree::bench
{
enum class KeyMode { kTimestamp, kLocation2d };

struct CheckinData {
  std::vector<KeyRecordPair> pairs{};
  std::vector<PointRecord> points{};
  std::size_t lines{};
  /// More records were requested than the file holds.
  bool short_file{};
};

/// Seconds since 1970-01-01T00:00:00Z for "YYYY-MM-DDTHH:MM:SS[Z]".
std::optional<std::int64_t> parse_timestamp(std::string_view s);

/**
 * @brief Reads a check-in TSV: user, ISO-8601 time, latitude, longitude, location id.
 *
 * Timestamp mode keys by epoch seconds; location mode by (round(lat*1e4),
 * round(lon*1e4)). The record handle is the 1-based line number. When `n` is below
 * the line count a seeded uniform subset is kept. Throws FileNotFound, ParseError.
 */
CheckinData ingest_checkins(const std::string &path, KeyMode mode, std::optional<std::size_t> n,
                            std::uint64_t seed);

/// n pairs with distinct uniform keys in [0, 2^40) and rec = index, sorted.
std::vector<KeyRecordPair> synthetic_pairs(std::size_t n, std::uint64_t seed);

/// n points with uniform coordinates in [0, 2^20) and rec = index.
std::vector<PointRecord> synthetic_points(std::size_t n, std::size_t dims, std::uint64_t seed);

/// Windows of ceil(selectivity * n) consecutive sorted ranks, start uniform.
std::vector<QueryRange> gen_queries(std::span<const Key> sorted_keys, double selectivity,
                                    std::size_t count, std::uint64_t seed);

/// One rank window of ceil(sqrt(selectivity) * n) per coordinate.
std::vector<BoxRange> gen_boxes(std::span<const PointRecord> points, double selectivity,
                                std::size_t count, std::uint64_t seed);

enum class Mode { kStatic, kDynamic, kRange2d };

struct ExperimentConfig {
  Mode mode{Mode::kStatic};
  std::size_t n{4096};
  std::uint32_t branching{16};
  double selectivity{0.05};
  std::size_t query_count{1000};
  std::uint64_t seed{1};
  std::optional<std::string> dataset_path{};
  KeyMode key_mode{KeyMode::kTimestamp};
  EvalMode eval{EvalMode::kAnalytic};
};

/// Throws InvalidConfig.
void validate(const ExperimentConfig &cfg);

struct ResultRow {
  std::string structure{};
  std::size_t n{};
  std::uint32_t branching{};
  double selectivity{};
  std::optional<double> mean_query_io{};
  std::optional<double> mean_attempts{};
  std::optional<double> mean_insert_io{};
  std::optional<double> mean_delete_io{};
  std::uint64_t seed{};
  /// Queries answered without a quantum trigger (not written to the CSV).
  std::size_t fallbacks{};
};

/// Builds the quantum structure and its classical baseline on the same data, runs
/// the workload, and returns the quantum row followed by the classical row.
std::vector<ResultRow> run_experiment(const ExperimentConfig &cfg);

inline constexpr const char *kCsvHeader =
    "structure,N,B,selectivity,mean_query_io,mean_attempts,mean_insert_io,mean_delete_io,seed";

/// Header plus one line per row; reals with four decimals, empty when not applicable.
void write_csv(std::ostream &os, std::span<const ResultRow> rows);

/*######################################################################################
 * Oracle sweeps, shared by `verify` and the acceptance run
 *####################################################################################*/

struct StaticSweepStats {
  std::size_t instances{};
  std::size_t quantum_paths{};
  std::size_t support_mismatches{};
  std::size_t nonuniform{};
  std::size_t too_many_candidates{};
  std::size_t sparse{};
  std::size_t io_over_bound{};
  /// Largest analytic query IO divided by B(ceil(log_B N) + 1).
  double worst_io_ratio{};
};

/// Random static instances with N <= max_n, B cycling through {4, 8, 16}. Checks the
/// support against a linear filter, uniform weights, at most two candidates, in/total
/// >= 1/(8B), and analytic IO <= io_factor * B * (ceil(log_B N) + 1).
StaticSweepStats static_sweep(std::uint64_t seed, std::size_t instances, std::size_t max_n,
                              double io_factor);

struct DynamicWorkloadStats {
  std::size_t ops{};
  std::size_t audits{};
  std::size_t dirty_audits{};
  std::string first_violation{};
  std::size_t live{};
  double mean_insert_io{};
  std::size_t queries{};
  std::size_t query_mismatches{};
  /// Largest analytic attempt count over B * ceil(log_B N).
  double worst_attempt_ratio{};
};

/// `ops` inserts of fresh random pairs, each replaced by a delete of a random live pair
/// with probability 1/100; audits every `audit_every` ops, then flushes and runs
/// `queries` analytic queries against a linear filter.
DynamicWorkloadStats dynamic_workload(std::uint64_t seed, std::size_t ops, std::uint32_t b,
                                      std::size_t audit_every, std::size_t queries);

struct RangeSweepStats {
  std::size_t instances{};
  std::size_t quantum_paths{};
  std::size_t support_mismatches{};
  std::size_t classical_mismatches{};
  std::size_t nonuniform{};
  std::size_t audit_failures{};
  std::size_t io_over_bound{};
  double mean_quantum_io{};
  /// Mean classical IO of the queries with the smallest and largest third of k.
  double classical_io_low_k{};
  double classical_io_high_k{};
};

/// Random 2-d instances with N <= max_n and B in {4, 8, 16}; IO bound is
/// io_factor * B * (ceil(log_B N) + 1)^2.
RangeSweepStats range_sweep(std::uint64_t seed, std::size_t instances, std::size_t max_n,
                            double io_factor);

std::uint64_t ceil_log(std::uint64_t n, std::uint64_t b);

struct VerifyReport {
  std::vector<std::string> lines{};
  std::size_t failures{};
};

/// Invariant and oracle sweeps over every structure: static oracle equivalence,
/// dynamic workload audits, range tree oracles.
VerifyReport run_verify(std::uint64_t seed);

}  // namespace qbtree::bench

#endif  // QBTREE_BENCH_HPP

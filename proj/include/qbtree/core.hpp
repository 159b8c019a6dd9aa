#ifndef QBTREE_CORE_HPP
#define QBTREE_CORE_HPP

#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbtree
{
/*######################################################################################
 * Errors
 *####################################################################################*/

enum class ErrorCode {
  kNotPowerOfTwo,
  kTooSmall,
  kDuplicatePair,
  kInvertedRange,
  kInvalidKey,
  kEmptySet,
  kZeroWeight,
  kEmptyState,
  kEmptyDataset,
  kNoResults,
  kNotFound,
  kParseError,
  kFileNotFound,
  kInvalidConfig,
  kDimensionMismatch,
};

/// Name of an error code, e.g. "DuplicatePair".
const char *to_string(ErrorCode code);

class Error : public std::runtime_error
{
 public:
  Error(ErrorCode code, const std::string &what);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/*######################################################################################
 * Keys and records
 *####################################################################################*/

using Key = std::int64_t;

/// The reserved maximum of the key domain. Real keys are strictly smaller, so dummy
/// slots sort after every real entry.
inline constexpr Key kDummyKey = std::numeric_limits<Key>::max();

struct RecordHandle {
  std::uint64_t id{};

  auto operator<=>(const RecordHandle &) const = default;
};

struct KeyRecordPair {
  Key key{};
  RecordHandle rec{};

  auto operator<=>(const KeyRecordPair &) const = default;

  static constexpr KeyRecordPair dummy() noexcept
  {
    return {kDummyKey, RecordHandle{std::numeric_limits<std::uint64_t>::max()}};
  }

  [[nodiscard]] constexpr bool is_dummy() const noexcept { return key == kDummyKey; }
};

/// Inclusive key range [lo, hi].
struct QueryRange {
  Key lo{};
  Key hi{};

  [[nodiscard]] constexpr bool contains(Key k) const noexcept { return lo <= k && k <= hi; }

  auto operator<=>(const QueryRange &) const = default;
};

QueryRange make_range(Key lo, Key hi);

/*######################################################################################
 * Tree parameters
 *####################################################################################*/

struct TreeParams {
  std::uint32_t branching{};
  std::uint32_t log2_branching{};

  /// B^e, exact for every exponent the trees use.
  [[nodiscard]] std::uint64_t pow(std::uint32_t e) const;
};

/// B must be a power of two and at least 4.
TreeParams validate_params(std::uint64_t branching);

/*######################################################################################
 * Datasets
 *####################################################################################*/

/// Key-record pairs sorted by (key, rec) with no duplicate pair.
class Dataset
{
 public:
  Dataset() = default;

  [[nodiscard]] std::span<const KeyRecordPair> pairs() const noexcept { return pairs_; }
  [[nodiscard]] std::size_t size() const noexcept { return pairs_.size(); }
  [[nodiscard]] bool empty() const noexcept { return pairs_.empty(); }

 private:
  friend Dataset make_dataset(std::vector<KeyRecordPair> pairs);

  std::vector<KeyRecordPair> pairs_{};
};

Dataset make_dataset(std::vector<KeyRecordPair> pairs);

/*######################################################################################
 * Multi-dimensional keys
 *####################################################################################*/

using Point = std::vector<Key>;

struct PointRecord {
  Point key{};
  RecordHandle rec{};

  auto operator<=>(const PointRecord &) const = default;
};

/// Per-dimension inclusive ranges.
struct BoxRange {
  std::vector<QueryRange> dims{};

  [[nodiscard]] bool contains(const Point &p) const noexcept;
};

BoxRange make_box(std::span<const Key> lo, std::span<const Key> hi);

}  // namespace qbtree

#endif  // QBTREE_CORE_HPP

#include "qbtree/core.hpp"

#include <algorithm>
#include <bit>

namespace qbtree
{
const char *to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::kNotPowerOfTwo:
      return "NotPowerOfTwo";
    case ErrorCode::kTooSmall:
      return "TooSmall";
    case ErrorCode::kDuplicatePair:
      return "DuplicatePair";
    case ErrorCode::kInvertedRange:
      return "InvertedRange";
    case ErrorCode::kInvalidKey:
      return "InvalidKey";
    case ErrorCode::kEmptySet:
      return "EmptySet";
    case ErrorCode::kZeroWeight:
      return "ZeroWeight";
    case ErrorCode::kEmptyState:
      return "EmptyState";
    case ErrorCode::kEmptyDataset:
      return "EmptyDataset";
    case ErrorCode::kNoResults:
      return "NoResults";
    case ErrorCode::kNotFound:
      return "NotFound";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kFileNotFound:
      return "FileNotFound";
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &what)
    : std::runtime_error{std::string{to_string(code)} + ": " + what}, code_{code}
{
}

QueryRange make_range(Key lo, Key hi)
{
  if (lo > hi) {
    throw Error{ErrorCode::kInvertedRange,
                "lower bound " + std::to_string(lo) + " exceeds " + std::to_string(hi)};
  }
  return {lo, hi};
}

std::uint64_t TreeParams::pow(std::uint32_t e) const
{
  // B is a power of two, so B^e is a shift; callers never exceed 63 bits.
  const std::uint64_t shift = static_cast<std::uint64_t>(log2_branching) * e;
  if (shift >= 63) {
    throw std::overflow_error{"B^e exceeds 63 bits"};
  }
  return std::uint64_t{1} << shift;
}

TreeParams validate_params(std::uint64_t branching)
{
  if (!std::has_single_bit(branching)) {
    throw Error{ErrorCode::kNotPowerOfTwo, std::to_string(branching) + " is not a power of 2"};
  }
  if (branching < 4) {
    throw Error{ErrorCode::kTooSmall, "B must be at least 4"};
  }
  if (branching > (std::uint64_t{1} << 16)) {
    throw Error{ErrorCode::kInvalidConfig, "B above 65536 is not supported"};
  }
  return {static_cast<std::uint32_t>(branching),
          static_cast<std::uint32_t>(std::countr_zero(branching))};
}

Dataset make_dataset(std::vector<KeyRecordPair> pairs)
{
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].key == kDummyKey) {
      throw Error{ErrorCode::kInvalidKey, "key equals the reserved dummy value"};
    }
    if (i > 0 && pairs[i] == pairs[i - 1]) {
      throw Error{ErrorCode::kDuplicatePair, "pair (" + std::to_string(pairs[i].key) + ", " +
                                                 std::to_string(pairs[i].rec.id) +
                                                 ") appears twice"};
    }
  }
  Dataset d;
  d.pairs_ = std::move(pairs);
  return d;
}

bool BoxRange::contains(const Point &p) const noexcept
{
  if (p.size() != dims.size()) {
    return false;
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!dims[i].contains(p[i])) {
      return false;
    }
  }
  return true;
}

BoxRange make_box(std::span<const Key> lo, std::span<const Key> hi)
{
  if (lo.size() != hi.size() || lo.empty()) {
    throw Error{ErrorCode::kDimensionMismatch, "box bounds must have equal, non-zero length"};
  }
  BoxRange box;
  box.dims.reserve(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    box.dims.push_back(make_range(lo[i], hi[i]));
  }
  return box;
}

}  // namespace qbtree

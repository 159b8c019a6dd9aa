#include "qbtree/qstate.hpp"

#include <numeric>
#include <stdexcept>

#include "qbtree/qram.hpp"

namespace qbtree
{
namespace
{
__extension__ using Wide = unsigned __int128;
}

Rational::Rational(std::uint64_t num, std::uint64_t den)
{
  if (den == 0) throw std::invalid_argument{"rational with zero denominator"};
  const auto g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

std::strong_ordering Rational::operator<=>(const Rational &rhs) const noexcept
{
  const auto lhs_cross = static_cast<Wide>(num_) * rhs.den_;
  const auto rhs_cross = static_cast<Wide>(rhs.num_) * den_;
  return lhs_cross <=> rhs_cross;
}

std::uint64_t Rng::below(std::uint64_t bound)
{
  return std::uniform_int_distribution<std::uint64_t>{0, bound - 1}(engine_);
}

std::uint64_t Rng::derive_seed(std::uint64_t master, std::uint64_t stream) noexcept
{
  // splitmix64 over the combined input
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

FlaggedState<KeyRecordPair> mark_in_range(const WeightedState<KeyRecordPair> &state,
                                          const QueryRange &range)
{
  return mark_if(state, [&](const KeyRecordPair &p) {
    return !p.is_dummy() && range.contains(p.key);
  });
}

namespace
{
WeightedState<BankAddress> fan_out(const WeightedState<NodeRef> &state, std::uint32_t branching)
{
  std::vector<std::pair<BankAddress, Weight>> addrs;
  addrs.reserve(state.size() * branching);
  for (const auto &[ref, w] : state.entries()) {
    for (std::uint32_t j = 0; j < branching; ++j) {
      addrs.push_back({BankAddress{ref.bank, address_of(ref.node, j, branching)}, w});
    }
  }
  return WeightedState<BankAddress>::from_entries(std::move(addrs));
}

NodeRef to_ref(NodeId id) { return id.is_dummy() ? NodeRef::dummy() : NodeRef{0, id}; }

}  // namespace

WeightedState<NodeRef> descend(const WeightedState<NodeRef> &state, const QramBank &hierarchy,
                               std::uint32_t branching, IoCounters &io)
{
  const auto loaded = hierarchy.load_superposed(fan_out(state, branching), io);
  std::vector<std::pair<NodeRef, Weight>> children;
  children.reserve(loaded.size());
  for (const auto &[cell, w] : loaded.entries()) {
    const auto &[addr, value] = cell;
    if (const auto *child = std::get_if<NodeId>(&value); child != nullptr && !child->is_dummy()) {
      children.push_back({NodeRef{addr.bank, *child}, w});
    } else if (std::holds_alternative<DummyValue>(value) ||
               (child != nullptr && child->is_dummy())) {
      children.push_back({NodeRef::dummy(), w});
    } else {
      throw std::logic_error{"hierarchy QRAM cell holds a non-node value"};
    }
  }
  return WeightedState<NodeRef>::from_entries(std::move(children));
}

WeightedState<NodeId> descend(const WeightedState<NodeId> &state, const Qram &hierarchy,
                              std::uint32_t branching, IoCounters &io)
{
  std::vector<std::pair<NodeRef, Weight>> refs;
  refs.reserve(state.size());
  for (const auto &[id, w] : state.entries()) refs.push_back({to_ref(id), w});
  const auto out = descend(WeightedState<NodeRef>::from_entries(std::move(refs)),
                           QramBank{{&hierarchy}}, branching, io);
  std::vector<std::pair<NodeId, Weight>> ids;
  ids.reserve(out.size());
  for (const auto &[ref, w] : out.entries()) ids.push_back({ref.node, w});
  return WeightedState<NodeId>::from_entries(std::move(ids));
}

WeightedState<KeyRecordPair> load_pairs(const WeightedState<NodeRef> &state,
                                        const QramBank &data, std::uint32_t branching,
                                        IoCounters &io)
{
  const auto loaded = data.load_superposed(fan_out(state, branching), io);
  std::vector<std::pair<KeyRecordPair, Weight>> pairs;
  pairs.reserve(loaded.size());
  for (const auto &[cell, w] : loaded.entries()) {
    const auto &value = cell.second;
    if (const auto *p = std::get_if<KeyRecordPair>(&value)) {
      pairs.push_back({*p, w});
    } else if (std::holds_alternative<DummyValue>(value)) {
      pairs.push_back({KeyRecordPair::dummy(), w});
    } else {
      throw std::logic_error{"load_pairs reached a non-leaf cell"};
    }
  }
  return WeightedState<KeyRecordPair>::from_entries(std::move(pairs));
}

WeightedState<KeyRecordPair> load_pairs(const WeightedState<NodeId> &state, const Qram &data,
                                        std::uint32_t branching, IoCounters &io)
{
  std::vector<std::pair<NodeRef, Weight>> refs;
  refs.reserve(state.size());
  for (const auto &[id, w] : state.entries()) refs.push_back({to_ref(id), w});
  return load_pairs(WeightedState<NodeRef>::from_entries(std::move(refs)), QramBank{{&data}},
                    branching, io);
}

}  // namespace qbtree

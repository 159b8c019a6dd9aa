#include "qbtree/qram.hpp"

#include <string>
#include <type_traits>

namespace qbtree
{
namespace
{
const QramValue kDummyCell{DummyValue{}};

// Anything in the top 2^16 addresses belongs to the dummy node's block for every
// supported B, so it can never be a real cell.
constexpr Address kReservedFloor = ~Address{0} - (Address{1} << 16);

}  // namespace

QramWord encode(const QramValue &value) noexcept
{
  return std::visit(
      [](const auto &v) -> QramWord {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DummyValue>) {
          return {0, 0, 0};
        } else if constexpr (std::is_same_v<T, NodeId>) {
          return {1, v.value, 0};
        } else if constexpr (std::is_same_v<T, KeyRecordPair>) {
          return {2, static_cast<std::uint64_t>(v.key), v.rec.id};
        } else {
          return {3, static_cast<std::uint64_t>(v.lo), static_cast<std::uint64_t>(v.hi)};
        }
      },
      value);
}

void Qram::store(Address addr, QramValue value, IoCounters &io)
{
  if (addr > kReservedFloor) {
    throw Error{ErrorCode::kInvalidConfig,
                "address " + std::to_string(addr) + " lies in the reserved dummy block"};
  }
  if (addr >= cells_.size()) {
    cells_.resize(addr + 1, kDummyCell);
  }
  cells_[addr] = std::move(value);
  ++io.qram_stores;
}

const QramValue &Qram::peek(Address addr) const noexcept
{
  return addr < cells_.size() ? cells_[addr] : kDummyCell;
}

WeightedState<std::pair<Address, QramValue>> Qram::load_superposed(
    const WeightedState<Address> &addrs, IoCounters &io) const
{
  std::vector<std::pair<std::pair<Address, QramValue>, Weight>> out;
  out.reserve(addrs.size());
  for (const auto &[addr, w] : addrs.entries()) out.push_back({{addr, peek(addr)}, w});
  ++io.qram_loads;
  return WeightedState<std::pair<Address, QramValue>>::from_entries(std::move(out));
}

QramWord Qram::xor_load(Address addr, const QramWord &reg, IoCounters &io) const
{
  ++io.qram_loads;
  const QramWord v = encode(peek(addr));
  return {reg[0] ^ v[0], reg[1] ^ v[1], reg[2] ^ v[2]};
}

const QramValue &QramBank::peek(BankAddress a) const noexcept
{
  return a.bank < banks_.size() ? banks_[a.bank]->peek(a.addr) : kDummyCell;
}

WeightedState<std::pair<BankAddress, QramValue>> QramBank::load_superposed(
    const WeightedState<BankAddress> &addrs, IoCounters &io) const
{
  std::vector<std::pair<std::pair<BankAddress, QramValue>, Weight>> out;
  out.reserve(addrs.size());
  for (const auto &[addr, w] : addrs.entries()) out.push_back({{addr, peek(addr)}, w});
  ++io.qram_loads;
  return WeightedState<std::pair<BankAddress, QramValue>>::from_entries(std::move(out));
}

}  // namespace qbtree

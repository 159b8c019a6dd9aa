#ifndef QBTREE_QRAM_HPP
#define QBTREE_QRAM_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "qbtree/core.hpp"
#include "qbtree/metrics.hpp"
#include "qbtree/node.hpp"
#include "qbtree/qstate.hpp"

namespace qbtree
{
using Address = std::uint64_t;

/// Cell address of slot `slot` of `node`. The dummy node wraps to the top B addresses,
/// a reserved block that is never written and therefore always reads Dummy.
constexpr Address address_of(NodeId node, std::uint32_t slot, std::uint32_t branching) noexcept
{
  return node.value * branching + slot;
}

struct DummyValue {
  auto operator<=>(const DummyValue &) const = default;
};

/// Contents of one QRAM cell.
using QramValue = std::variant<DummyValue, NodeId, KeyRecordPair, RoutingKey>;

/// Fixed-width bit pattern of a cell, as a destination register would hold it.
using QramWord = std::array<std::uint64_t, 3>;

QramWord encode(const QramValue &value) noexcept;

/**
 * @brief Classical-write quantum-read memory.
 *
 * Stores are classical. A load takes a whole superposition of addresses and returns
 * the superposition of (address, value) in one step, charged as a single IO.
 */
class Qram
{
 public:
  Qram() = default;

  /// cells[addr] = value; one store IO. The reserved dummy block rejects writes.
  void store(Address addr, QramValue value, IoCounters &io);

  /// Unmetered inspection, for audits and tests.
  [[nodiscard]] const QramValue &peek(Address addr) const noexcept;

  [[nodiscard]] WeightedState<std::pair<Address, QramValue>> load_superposed(
      const WeightedState<Address> &addrs, IoCounters &io) const;

  /// register XOR encode(cells[addr]); one load IO.
  [[nodiscard]] QramWord xor_load(Address addr, const QramWord &reg, IoCounters &io) const;

  [[nodiscard]] std::size_t written_extent() const noexcept { return cells_.size(); }

 private:
  std::vector<QramValue> cells_{};
};

/// An address inside one QRAM of a bank.
struct BankAddress {
  std::uint32_t bank{};
  Address addr{};

  auto operator<=>(const BankAddress &) const = default;
};

/// Several QRAMs viewed as one address space; a load over addresses spread across the
/// banks is still one QRAM application.
class QramBank
{
 public:
  QramBank() = default;
  explicit QramBank(std::vector<const Qram *> banks) : banks_{std::move(banks)} {}

  std::uint32_t add(const Qram &q)
  {
    banks_.push_back(&q);
    return static_cast<std::uint32_t>(banks_.size() - 1);
  }

  [[nodiscard]] std::size_t size() const noexcept { return banks_.size(); }

  [[nodiscard]] const QramValue &peek(BankAddress a) const noexcept;

  [[nodiscard]] WeightedState<std::pair<BankAddress, QramValue>> load_superposed(
      const WeightedState<BankAddress> &addrs, IoCounters &io) const;

 private:
  std::vector<const Qram *> banks_{};
};

}  // namespace qbtree

#endif  // QBTREE_QRAM_HPP

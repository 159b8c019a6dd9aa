#ifndef QBTREE_NODE_HPP
#define QBTREE_NODE_HPP

#include <compare>
#include <cstdint>
#include <limits>

#include "qbtree/core.hpp"

namespace qbtree
{
/// Node identifier inside one tree. Ids are allocated breadth-first by the builders;
/// the maximum value is the dummy node.
struct NodeId {
  std::uint64_t value{};

  auto operator<=>(const NodeId &) const = default;

  static constexpr NodeId dummy() noexcept
  {
    return NodeId{std::numeric_limits<std::uint64_t>::max()};
  }

  [[nodiscard]] constexpr bool is_dummy() const noexcept { return *this == dummy(); }
};

/// Bounds (L, U) of every key stored beneath a node.
struct RoutingKey {
  Key lo{};
  Key hi{};

  auto operator<=>(const RoutingKey &) const = default;

  static constexpr RoutingKey dummy() noexcept { return {kDummyKey, kDummyKey}; }

  [[nodiscard]] constexpr bool is_dummy() const noexcept { return lo == kDummyKey; }
};

/// A node of one of several trees that share a QRAM address space.
struct NodeRef {
  std::uint32_t bank{};
  NodeId node{};

  auto operator<=>(const NodeRef &) const = default;

  static constexpr NodeRef dummy() noexcept
  {
    return {std::numeric_limits<std::uint32_t>::max(), NodeId::dummy()};
  }

  [[nodiscard]] constexpr bool is_dummy() const noexcept { return node.is_dummy(); }
};

}  // namespace qbtree

#endif  // QBTREE_NODE_HPP

#ifndef QBTREE_METRICS_HPP
#define QBTREE_METRICS_HPP

#include <cstdint>

namespace qbtree
{
/**
 * @brief Per-run memory-access tally.
 *
 * A QRAM load or store is one IO regardless of how many addresses the loaded
 * superposition spans. A classical node (page) read or write is one IO. Post-selection
 * attempts are tracked next to the IOs but are not IOs themselves.
 */
struct IoCounters {
  std::uint64_t qram_loads{};
  std::uint64_t qram_stores{};
  std::uint64_t classical_node_accesses{};
  std::uint64_t post_selection_attempts{};

  [[nodiscard]] constexpr std::uint64_t total_io() const noexcept
  {
    return qram_loads + qram_stores + classical_node_accesses;
  }

  constexpr void reset() noexcept { *this = IoCounters{}; }

  [[nodiscard]] constexpr IoCounters snapshot() const noexcept { return *this; }

  constexpr IoCounters &operator+=(const IoCounters &rhs) noexcept
  {
    qram_loads += rhs.qram_loads;
    qram_stores += rhs.qram_stores;
    classical_node_accesses += rhs.classical_node_accesses;
    post_selection_attempts += rhs.post_selection_attempts;
    return *this;
  }

  /// Field-wise difference; `earlier` must be a snapshot of the same run.
  [[nodiscard]] constexpr IoCounters since(const IoCounters &earlier) const noexcept
  {
    return {qram_loads - earlier.qram_loads, qram_stores - earlier.qram_stores,
            classical_node_accesses - earlier.classical_node_accesses,
            post_selection_attempts - earlier.post_selection_attempts};
  }

  constexpr bool operator==(const IoCounters &) const = default;
};

}  // namespace qbtree

#endif  // QBTREE_METRICS_HPP

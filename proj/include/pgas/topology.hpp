#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "pgas/types.hpp"

namespace pgas {

/// Locality tier of a unit pair, from cheapest to most expensive.
enum class HopClass : std::uint8_t { IntraNode = 0, Rank1 = 1, Rank2 = 2, Rank3 = 3 };

inline constexpr std::size_t kNumHopClasses = 4;

const char* to_string(HopClass hop);

/// SMP-style placement on a three-level hierarchy: units fill a node before
/// moving to the next, nodes fill a chassis, chassis fill a group.
struct Topology {
  std::uint32_t num_units = 1;
  std::uint32_t node_size = 1;
  std::uint32_t blades_per_chassis = 16;
  std::uint32_t chassis_per_group = 1;

  std::uint32_t node_of(UnitId u) const { return u.index / node_size; }
  std::uint32_t chassis_of_node(std::uint32_t node) const { return node / blades_per_chassis; }
  std::uint32_t group_of_chassis(std::uint32_t chassis) const { return chassis / chassis_per_group; }
  std::uint32_t num_nodes() const { return (num_units + node_size - 1) / node_size; }

  bool same_node(UnitId a, UnitId b) const { return node_of(a) == node_of(b); }

  /// Throws Error(InvalidConfig) if any count is zero.
  void validate() const;
};

HopClass classify(const Topology& topo, UnitId origin, UnitId target);

/// Linear cost model: seconds = base[c] + nbytes * inv_bandwidth[c].
struct LatencyModel {
  std::array<double, kNumHopClasses> base_seconds{0.5e-6, 2e-6, 4e-6, 8e-6};
  std::array<double, kNumHopClasses> seconds_per_byte{0.1e-9, 0.5e-9, 0.7e-9, 1.0e-9};

  double cost(HopClass hop, std::size_t nbytes) const {
    const auto c = static_cast<std::size_t>(hop);
    return base_seconds[c] + static_cast<double>(nbytes) * seconds_per_byte[c];
  }

  /// Non-negative parameters, bases non-decreasing along the hierarchy.
  void validate() const;
};

}  // namespace pgas

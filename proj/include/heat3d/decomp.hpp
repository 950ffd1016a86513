#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "heat3d/grid.hpp"

namespace heat3d {

/// x: West/East, y: South/North, z: Down/Up. Listed in exchange order.
enum class Direction { South, North, West, East, Up, Down };
inline constexpr std::array<Direction, 6> kExchangeOrder{Direction::South, Direction::North, Direction::West,
                                                         Direction::East,  Direction::Up,    Direction::Down};
std::string_view to_string(Direction d);

struct Coord {
  int px = 0, py = 0, pz = 0;
  bool operator==(const Coord&) const = default;
};

/// Px x Py x Pz process grid without wraparound.
struct CartTopology {
  int px = 1, py = 1, pz = 1;

  int size() const { return px * py * pz; }
  Coord coord(int rank) const;
  int rank(Coord c) const { return (c.px * py + c.py) * pz + c.pz; }
  std::optional<int> neighbor(int rank, Direction d) const;
};

/// Interior extent of one rank and where it sits in the global interior.
struct Extents {
  std::int64_t xcell = 0, ycell = 0, zcell = 0;
  std::int64_t x0 = 0, y0 = 0, z0 = 0;

  std::int64_t storage_cells() const { return (xcell + 2) * (ycell + 2) * (zcell + 2); }
  /// Storage index of local cell (i, j, k); halo at 0 and extent+1.
  std::int64_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return (i * (ycell + 2) + j) * (zcell + 2) + k;
  }
};

struct Decomposition {
  CartTopology topo;
  std::vector<Extents> extents;  // by rank

  std::int64_t max_storage_cells() const;
};

/// Splits n cells into parts pieces; the first n % parts pieces get one more.
std::vector<std::int64_t> split_extent(std::int64_t n, int parts);

/// Factor triple of `units` with the smallest spread, ties broken toward
/// larger Pz, then larger Py.
CartTopology choose_factors(int units);

/// Throws ConfigError if a factor exceeds the cell count on its axis.
Decomposition decompose(const GridSpec& grid, int units);

}  // namespace heat3d

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "heat3d/grid.hpp"

namespace heat3d {

/// Whole global grid including the boundary layer, z fastest:
/// value(i, j, k) with i in [0, nx+1] etc.
struct Field {
  std::int64_t nx = 0, ny = 0, nz = 0;
  double dx = 1.0, dy = 1.0, dz = 1.0;
  std::vector<double> values;

  static Field for_grid(const GridSpec& grid);

  std::int64_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return (i * (ny + 2) + j) * (nz + 2) + k;
  }
  double& at(std::int64_t i, std::int64_t j, std::int64_t k) { return values[static_cast<std::size_t>(index(i, j, k))]; }
  double at(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return values[static_cast<std::size_t>(index(i, j, k))];
  }
};

/// Dump format: int64 nx ny nz, float64 dx dy dz, then every value, all
/// little-endian.
void write_field(const std::filesystem::path& path, const Field& f);
Field read_field(const std::filesystem::path& path);

}  // namespace heat3d

#pragma once

#include <cstdint>

#include "heat3d/field.hpp"
#include "heat3d/grid.hpp"

namespace oracle {

/// Single-threaded reference solve of the whole grid: same stencil, same
/// per-cell arithmetic order, no decomposition, no communication.
heat3d::Field serial_solve(const heat3d::GridSpec& grid, const heat3d::SolverParams& params);

struct Comparison {
  double max_abs_diff = 0.0;
  /// Flat index of the first differing value, -1 if the fields are equal.
  std::int64_t first_diff_index = -1;

  bool identical() const { return first_diff_index < 0; }
};

/// Exact elementwise comparison. Throws std::invalid_argument on a shape
/// mismatch.
Comparison compare(const heat3d::Field& a, const heat3d::Field& b);

}  // namespace oracle

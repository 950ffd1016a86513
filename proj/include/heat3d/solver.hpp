#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "heat3d/decomp.hpp"
#include "heat3d/field.hpp"
#include "heat3d/grid.hpp"
#include "pgas/runtime.hpp"

namespace heat3d {

/// Per-unit instrumentation of halo_exchange and step.
struct Counters {
  std::uint64_t gets = 0;
  std::uint64_t barriers = 0;
  std::uint64_t steps = 0;
  double get_seconds = 0.0;
  double barrier_seconds = 0.0;
  double compute_seconds = 0.0;
};

/// One unit's share of the solve. Construction and release() are collective
/// over all units of the launch.
class Solver {
 public:
  Solver(pgas::Unit& unit, const GridSpec& grid, const SolverParams& params, const Decomposition& decomp);

  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  /// Pulls the six neighbor faces of the current iterate into the halo:
  /// rounds South, North, West, East, Up, Down, each closed by a barrier.
  /// `before_last_barrier` runs after the Down gets and before the final
  /// barrier.
  void halo_exchange(const std::function<void()>& before_last_barrier = {});

  /// Stencil update of the interior from the current iterate into the other
  /// buffer, which then becomes current. Returns the local max |dT|.
  double step();

  /// halo_exchange with step() run before its final barrier, so no unit
  /// overwrites a buffer a neighbor may still be reading.
  double iterate();

  void release();

  int rank() const { return rank_; }
  const Extents& extents() const { return ext_; }
  const Decomposition& decomposition() const { return decomp_; }
  const Counters& counters() const { return counters_; }

  /// Current iterate at local storage coordinates (halo included).
  double at(std::int64_t i, std::int64_t j, std::int64_t k) const;
  /// Writes this unit's interior into `f` at its global position.
  void copy_interior_to(Field& f) const;

 private:
  double* buffer(int which);
  const double* buffer(int which) const;
  std::uint64_t byte_offset(int which, const Extents& e, std::int64_t i, std::int64_t j, std::int64_t k) const;
  void get_run(double* dst, int neighbor, std::int64_t i, std::int64_t j, std::int64_t k, std::int64_t count);
  void timed_barrier();

  pgas::Unit& unit_;
  GridSpec grid_;
  SolverParams params_;
  const Decomposition& decomp_;
  int rank_;
  Extents ext_;
  std::int64_t stride_cells_;  // cells per buffer, same on every unit
  pgas::GlobalPointer base_;
  double* local_ = nullptr;
  int current_ = 0;
  bool released_ = false;
  Counters counters_;
};

struct RunOptions {
  pgas::RuntimeConfig runtime;
  bool assemble_field = false;
};

struct RankCounters {
  std::uint64_t gets = 0;
  std::uint64_t barriers = 0;
  int neighbors = 0;
  Extents extents;
};

struct RunReport {
  // Means over units of the per-unit totals.
  double compute_seconds = 0.0;
  double exchange_seconds = 0.0;  // get calls plus barrier calls
  double sync_seconds = 0.0;      // barrier calls only
  double pure_exchange_seconds() const { return exchange_seconds - sync_seconds; }

  std::int64_t iterations_done = 0;
  double final_max_delta = 0.0;
  CartTopology topo;
  std::vector<RankCounters> ranks;
  pgas::LaunchReport launch;
  std::optional<Field> field;

  std::uint64_t total_gets() const;
};

/// Closed-form gets one rank issues per halo exchange.
std::uint64_t expected_gets(const Decomposition& d, int rank);

/// Full solve on `options.runtime.num_units` units. Throws ConfigError for
/// invalid input before any unit starts.
RunReport run(const GridSpec& grid, const SolverParams& params, const RunOptions& options);

}  // namespace heat3d

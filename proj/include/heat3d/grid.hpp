#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace heat3d {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Global problem. NX, NY, NZ count interior cells; the Dirichlet boundary
/// is one extra layer of cells around them holding boundary_temp.
struct GridSpec {
  std::int64_t nx = 8;
  std::int64_t ny = 8;
  std::int64_t nz = 8;
  double dx = 1.0;
  double dy = 1.0;
  double dz = 1.0;
  double boundary_temp = 0.0;
  double initial_temp = 1.0;
  /// With a seed the interior starts as initial_temp * u, u uniform in [0,1)
  /// and drawn per global cell; without one it is initial_temp everywhere.
  std::optional<std::uint64_t> seed;
  /// Overrides both of the above when set. Values must stay inside
  /// [min(0, initial_temp, boundary_temp), max(...)] for the stability
  /// check to hold.
  std::function<double(std::int64_t, std::int64_t, std::int64_t)> initializer;

  void validate() const;
};

struct SolverParams {
  std::int64_t iterations = 5000;
  double dt = 0.1;
  double alpha0 = 1.0;
  double alpha_slope = 0.0;
  std::optional<double> convergence_eps;
  std::int64_t check_interval = 100;

  double alpha(double t) const {
    const double a = alpha0 + alpha_slope * t;
    return a > 0.0 ? a : 0.0;
  }
};

/// Largest diffusivity the run can see: alpha is linear in T and the field
/// stays inside [min, max] of its boundary and initial values.
double alpha_max(const GridSpec& grid, const SolverParams& params);

/// dt at the explicit-scheme stability limit.
double stable_dt(const GridSpec& grid, const SolverParams& params);

/// Throws ConfigError if the grid is malformed, the parameters are
/// inconsistent, or dt exceeds the stability limit.
void validate(const GridSpec& grid, const SolverParams& params);

/// Initial temperature of interior cell (i, j, k), zero-based global interior
/// coordinates. Independent of how the grid is decomposed.
double initial_value(const GridSpec& grid, std::int64_t i, std::int64_t j, std::int64_t k);

}  // namespace heat3d

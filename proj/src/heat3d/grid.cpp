#include "heat3d/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace heat3d {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void GridSpec::validate() const {
  if (nx < 1 || ny < 1 || nz < 1) {
    std::ostringstream os;
    os << "grid " << nx << "x" << ny << "x" << nz << " needs at least one cell per axis";
    throw ConfigError(os.str());
  }
  for (double d : {dx, dy, dz}) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("cell spacings must be positive and finite");
  }
  if (!std::isfinite(boundary_temp) || !std::isfinite(initial_temp)) {
    throw ConfigError("temperatures must be finite");
  }
}

double alpha_max(const GridSpec& grid, const SolverParams& params) {
  const double lo = std::min({grid.boundary_temp, grid.initial_temp, 0.0});
  const double hi = std::max({grid.boundary_temp, grid.initial_temp, 0.0});
  return std::max(params.alpha(lo), params.alpha(hi));
}

double stable_dt(const GridSpec& grid, const SolverParams& params) {
  const double a = alpha_max(grid, params);
  const double s = 1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dy * grid.dy) + 1.0 / (grid.dz * grid.dz);
  if (a == 0.0) return INFINITY;
  return 1.0 / (2.0 * a * s);
}

void validate(const GridSpec& grid, const SolverParams& params) {
  grid.validate();
  if (params.iterations < 0) throw ConfigError("iterations must be >= 0");
  if (params.check_interval < 1) throw ConfigError("check_interval must be >= 1");
  if (!std::isfinite(params.alpha0) || !std::isfinite(params.alpha_slope)) {
    throw ConfigError("diffusivity coefficients must be finite");
  }
  if (!(params.dt > 0.0) || !std::isfinite(params.dt)) throw ConfigError("dt must be positive and finite");
  const double limit = stable_dt(grid, params);
  if (params.dt > limit) {
    std::ostringstream os;
    os.precision(17);
    os << "dt " << params.dt << " exceeds the stability limit " << limit;
    throw ConfigError(os.str());
  }
}

double initial_value(const GridSpec& grid, std::int64_t i, std::int64_t j, std::int64_t k) {
  if (grid.initializer) return grid.initializer(i, j, k);
  if (!grid.seed) return grid.initial_temp;
  const auto linear = static_cast<std::uint64_t>((i * grid.ny + j) * grid.nz + k);
  const std::uint64_t r = splitmix64(*grid.seed ^ splitmix64(linear));
  const double u = static_cast<double>(r >> 11) * 0x1.0p-53;
  return grid.initial_temp * u;
}

}  // namespace heat3d

// Written independently of the distributed stencil on purpose: the only
// shared pieces are the input description and the initial condition.

#include "oracle/oracle.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace oracle {

heat3d::Field serial_solve(const heat3d::GridSpec& grid, const heat3d::SolverParams& params) {
  heat3d::validate(grid, params);
  heat3d::Field cur = heat3d::Field::for_grid(grid);
  for (std::int64_t i = 1; i <= grid.nx; ++i)
    for (std::int64_t j = 1; j <= grid.ny; ++j)
      for (std::int64_t k = 1; k <= grid.nz; ++k) cur.at(i, j, k) = heat3d::initial_value(grid, i - 1, j - 1, k - 1);
  heat3d::Field next = cur;

  const double hx = grid.dx * grid.dx;
  const double hy = grid.dy * grid.dy;
  const double hz = grid.dz * grid.dz;

  for (std::int64_t it = 1; it <= params.iterations; ++it) {
    double biggest = 0.0;
    for (std::int64_t i = 1; i <= grid.nx; ++i) {
      for (std::int64_t j = 1; j <= grid.ny; ++j) {
        for (std::int64_t k = 1; k <= grid.nz; ++k) {
          const double t = cur.at(i, j, k);
          const double east = cur.at(i + 1, j, k), west = cur.at(i - 1, j, k);
          const double north = cur.at(i, j + 1, k), south = cur.at(i, j - 1, k);
          const double up = cur.at(i, j, k + 1), down = cur.at(i, j, k - 1);
          double a = params.alpha0 + params.alpha_slope * t;
          if (!(a > 0.0)) a = 0.0;
          double xterm = east - 2.0 * t;
          xterm = xterm + west;
          xterm = xterm / hx;
          double yterm = north - 2.0 * t;
          yterm = yterm + south;
          yterm = yterm / hy;
          double zterm = up - 2.0 * t;
          zterm = zterm + down;
          zterm = zterm / hz;
          const double sum = (xterm + yterm) + zterm;
          const double coef = params.dt * a;
          const double fresh = t + coef * sum;
          next.at(i, j, k) = fresh;
          const double change = std::fabs(fresh - t);
          if (change > biggest) biggest = change;
        }
      }
    }
    std::swap(cur.values, next.values);
    if (params.convergence_eps && it % params.check_interval == 0 && biggest < *params.convergence_eps) break;
  }
  return cur;
}

Comparison compare(const heat3d::Field& a, const heat3d::Field& b) {
  if (a.nx != b.nx || a.ny != b.ny || a.nz != b.nz || a.values.size() != b.values.size()) {
    std::ostringstream os;
    os << "field shapes differ: " << a.nx << "x" << a.ny << "x" << a.nz << " vs " << b.nx << "x" << b.ny << "x"
       << b.nz;
    throw std::invalid_argument(os.str());
  }
  Comparison c;
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    const double x = a.values[n], y = b.values[n];
    // Bitwise so that NaN payloads and signed zeros also count.
    if (std::memcmp(&x, &y, sizeof(double)) == 0) continue;
    if (c.first_diff_index < 0) c.first_diff_index = static_cast<std::int64_t>(n);
    const double d = std::fabs(x - y);
    if (std::isnan(d) || d > c.max_abs_diff) c.max_abs_diff = std::isnan(d) ? INFINITY : d;
  }
  return c;
}

}  // namespace oracle

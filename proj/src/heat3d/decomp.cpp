#include "heat3d/decomp.hpp"

#include <algorithm>
#include <sstream>

namespace heat3d {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::South: return "south";
    case Direction::North: return "north";
    case Direction::West: return "west";
    case Direction::East: return "east";
    case Direction::Up: return "up";
    case Direction::Down: return "down";
  }
  return "?";
}

Coord CartTopology::coord(int rank) const {
  return Coord{rank / (py * pz), (rank / pz) % py, rank % pz};
}

std::optional<int> CartTopology::neighbor(int r, Direction d) const {
  Coord c = coord(r);
  switch (d) {
    case Direction::West: --c.px; break;
    case Direction::East: ++c.px; break;
    case Direction::South: --c.py; break;
    case Direction::North: ++c.py; break;
    case Direction::Down: --c.pz; break;
    case Direction::Up: ++c.pz; break;
  }
  if (c.px < 0 || c.px >= px || c.py < 0 || c.py >= py || c.pz < 0 || c.pz >= pz) return std::nullopt;
  return rank(c);
}

std::int64_t Decomposition::max_storage_cells() const {
  std::int64_t m = 0;
  for (const auto& e : extents) m = std::max(m, e.storage_cells());
  return m;
}

std::vector<std::int64_t> split_extent(std::int64_t n, int parts) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(parts), n / parts);
  for (std::int64_t r = 0; r < n % parts; ++r) ++out[static_cast<std::size_t>(r)];
  return out;
}

CartTopology choose_factors(int units) {
  if (units < 1) throw ConfigError("need at least one unit");
  CartTopology best{units, 1, 1};
  int best_spread = units - 1;
  for (int a = 1; a <= units; ++a) {
    if (units % a) continue;
    for (int b = 1; b <= units / a; ++b) {
      if ((units / a) % b) continue;
      const int c = units / a / b;
      const int spread = std::max({a, b, c}) - std::min({a, b, c});
      const bool better = spread < best_spread ||
                          (spread == best_spread && (c > best.pz || (c == best.pz && b > best.py)));
      if (better) {
        best = CartTopology{a, b, c};
        best_spread = spread;
      }
    }
  }
  return best;
}

Decomposition decompose(const GridSpec& grid, int units) {
  grid.validate();
  Decomposition d;
  d.topo = choose_factors(units);
  const auto& t = d.topo;
  if (t.px > grid.nx || t.py > grid.ny || t.pz > grid.nz) {
    std::ostringstream os;
    os << units << " units factor as " << t.px << "x" << t.py << "x" << t.pz << ", which does not fit the "
       << grid.nx << "x" << grid.ny << "x" << grid.nz << " grid";
    throw ConfigError(os.str());
  }
  const auto xs = split_extent(grid.nx, t.px);
  const auto ys = split_extent(grid.ny, t.py);
  const auto zs = split_extent(grid.nz, t.pz);
  auto offset = [](const std::vector<std::int64_t>& v, int upto) {
    std::int64_t s = 0;
    for (int q = 0; q < upto; ++q) s += v[static_cast<std::size_t>(q)];
    return s;
  };
  d.extents.resize(static_cast<std::size_t>(units));
  for (int r = 0; r < units; ++r) {
    const Coord c = t.coord(r);
    auto& e = d.extents[static_cast<std::size_t>(r)];
    e.xcell = xs[static_cast<std::size_t>(c.px)];
    e.ycell = ys[static_cast<std::size_t>(c.py)];
    e.zcell = zs[static_cast<std::size_t>(c.pz)];
    e.x0 = offset(xs, c.px);
    e.y0 = offset(ys, c.py);
    e.z0 = offset(zs, c.pz);
  }
  return d;
}

}  // namespace heat3d

#include "heat3d/field.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace heat3d {

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw ConfigError("field dump is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

Field Field::for_grid(const GridSpec& grid) {
  Field f;
  f.nx = grid.nx;
  f.ny = grid.ny;
  f.nz = grid.nz;
  f.dx = grid.dx;
  f.dy = grid.dy;
  f.dz = grid.dz;
  f.values.assign(static_cast<std::size_t>((f.nx + 2) * (f.ny + 2) * (f.nz + 2)), grid.boundary_temp);
  return f;
}

void write_field(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  put_le<std::int64_t>(os, f.nx);
  put_le<std::int64_t>(os, f.ny);
  put_le<std::int64_t>(os, f.nz);
  put_le<double>(os, f.dx);
  put_le<double>(os, f.dy);
  put_le<double>(os, f.dz);
  for (double v : f.values) put_le<double>(os, v);
  if (!os.flush()) throw ConfigError("write to " + path.string() + " failed");
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path.string());
  Field f;
  f.nx = get_le<std::int64_t>(is);
  f.ny = get_le<std::int64_t>(is);
  f.nz = get_le<std::int64_t>(is);
  f.dx = get_le<double>(is);
  f.dy = get_le<double>(is);
  f.dz = get_le<double>(is);
  if (f.nx < 1 || f.ny < 1 || f.nz < 1) throw ConfigError("field dump has a bad header");
  const auto n = static_cast<std::size_t>((f.nx + 2) * (f.ny + 2) * (f.nz + 2));
  f.values.resize(n);
  for (auto& v : f.values) v = get_le<double>(is);
  if (is.peek() != std::char_traits<char>::eof()) throw ConfigError("field dump has trailing bytes");
  return f;
}

}  // namespace heat3d

#include "heat3d/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

namespace heat3d {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

Solver::Solver(pgas::Unit& unit, const GridSpec& grid, const SolverParams& params, const Decomposition& decomp)
    : unit_(unit),
      grid_(grid),
      params_(params),
      decomp_(decomp),
      rank_(static_cast<int>(unit.myid().index)),
      ext_(decomp.extents.at(static_cast<std::size_t>(rank_))),
      stride_cells_(decomp.max_storage_cells()) {
  const auto nbytes = static_cast<std::size_t>(2 * stride_cells_) * sizeof(double);
  base_ = unit_.team_memalloc_aligned(pgas::kTeamAll, nbytes);
  auto mine = unit_.local_region(pgas::gptr_setunit(base_, unit_.myid()), nbytes);
  local_ = reinterpret_cast<double*>(mine.data());

  for (int b = 0; b < 2; ++b) {
    double* buf = buffer(b);
    std::fill(buf, buf + ext_.storage_cells(), grid_.boundary_temp);
    for (std::int64_t i = 1; i <= ext_.xcell; ++i)
      for (std::int64_t j = 1; j <= ext_.ycell; ++j)
        for (std::int64_t k = 1; k <= ext_.zcell; ++k)
          buf[ext_.index(i, j, k)] = initial_value(grid_, ext_.x0 + i - 1, ext_.y0 + j - 1, ext_.z0 + k - 1);
  }
  // Neighbors must not read before the initial field is in place.
  unit_.barrier(pgas::kTeamAll);
}

double* Solver::buffer(int which) { return local_ + which * stride_cells_; }
const double* Solver::buffer(int which) const { return local_ + which * stride_cells_; }

std::uint64_t Solver::byte_offset(int which, const Extents& e, std::int64_t i, std::int64_t j,
                                  std::int64_t k) const {
  return static_cast<std::uint64_t>(which * stride_cells_ + e.index(i, j, k)) * sizeof(double);
}

void Solver::get_run(double* dst, int neighbor, std::int64_t i, std::int64_t j, std::int64_t k,
                     std::int64_t count) {
  const Extents& ne = decomp_.extents[static_cast<std::size_t>(neighbor)];
  const auto src = pgas::gptr_incaddr(pgas::gptr_setunit(base_, pgas::UnitId{static_cast<std::uint32_t>(neighbor)}),
                                      byte_offset(current_, ne, i, j, k));
  unit_.get_blocking(std::span<double>(dst, static_cast<std::size_t>(count)), src);
  ++counters_.gets;
}

void Solver::timed_barrier() {
  const auto t0 = Clock::now();
  unit_.barrier(pgas::kTeamAll);
  counters_.barrier_seconds += seconds_since(t0);
  ++counters_.barriers;
}

void Solver::halo_exchange(const std::function<void()>& before_last_barrier) {
  const auto& topo = decomp_.topo;
  const Extents& e = ext_;
  double* cur = buffer(current_);

  for (Direction d : kExchangeOrder) {
    const auto nb = topo.neighbor(rank_, d);
    const auto t0 = Clock::now();
    if (nb) {
      const Extents& ne = decomp_.extents[static_cast<std::size_t>(*nb)];
      switch (d) {
        case Direction::South:
          for (std::int64_t i = 1; i <= e.xcell; ++i) get_run(cur + e.index(i, 0, 1), *nb, i, ne.ycell, 1, e.zcell);
          break;
        case Direction::North:
          for (std::int64_t i = 1; i <= e.xcell; ++i) get_run(cur + e.index(i, e.ycell + 1, 1), *nb, i, 1, 1, e.zcell);
          break;
        case Direction::West:
          for (std::int64_t j = 1; j <= e.ycell; ++j) get_run(cur + e.index(0, j, 1), *nb, ne.xcell, j, 1, e.zcell);
          break;
        case Direction::East:
          for (std::int64_t j = 1; j <= e.ycell; ++j) get_run(cur + e.index(e.xcell + 1, j, 1), *nb, 1, j, 1, e.zcell);
          break;
        case Direction::Up:
          for (std::int64_t i = 1; i <= e.xcell; ++i)
            for (std::int64_t j = 1; j <= e.ycell; ++j) get_run(cur + e.index(i, j, e.zcell + 1), *nb, i, j, 1, 1);
          break;
        case Direction::Down:
          for (std::int64_t i = 1; i <= e.xcell; ++i)
            for (std::int64_t j = 1; j <= e.ycell; ++j) get_run(cur + e.index(i, j, 0), *nb, i, j, ne.zcell, 1);
          break;
      }
    }
    counters_.get_seconds += seconds_since(t0);
    if (d == Direction::Down && before_last_barrier) before_last_barrier();
    timed_barrier();
  }
}

double Solver::step() {
  const auto t0 = Clock::now();
  const Extents& e = ext_;
  const double* c = buffer(current_);
  double* n = buffer(1 - current_);
  const std::int64_t sx = (e.ycell + 2) * (e.zcell + 2);
  const std::int64_t sy = e.zcell + 2;
  const double dx2 = grid_.dx * grid_.dx;
  const double dy2 = grid_.dy * grid_.dy;
  const double dz2 = grid_.dz * grid_.dz;
  const double dt = params_.dt;
  double delta = 0.0;
  for (std::int64_t i = 1; i <= e.xcell; ++i) {
    for (std::int64_t j = 1; j <= e.ycell; ++j) {
      const std::int64_t row = e.index(i, j, 0);
      for (std::int64_t k = 1; k <= e.zcell; ++k) {
        const std::int64_t p = row + k;
        const double t = c[p];
        const double lap = (c[p + sx] - 2.0 * t + c[p - sx]) / dx2 + (c[p + sy] - 2.0 * t + c[p - sy]) / dy2 +
                           (c[p + 1] - 2.0 * t + c[p - 1]) / dz2;
        const double v = t + dt * params_.alpha(t) * lap;
        n[p] = v;
        delta = std::max(delta, std::fabs(v - t));
      }
    }
  }
  current_ = 1 - current_;
  ++counters_.steps;
  counters_.compute_seconds += seconds_since(t0);
  return delta;
}

double Solver::iterate() {
  double delta = 0.0;
  halo_exchange([&] { delta = step(); });
  return delta;
}

void Solver::release() {
  if (released_) return;
  unit_.team_memfree(pgas::kTeamAll, base_);
  released_ = true;
  local_ = nullptr;
}

double Solver::at(std::int64_t i, std::int64_t j, std::int64_t k) const {
  return buffer(current_)[ext_.index(i, j, k)];
}

void Solver::copy_interior_to(Field& f) const {
  const double* c = buffer(current_);
  for (std::int64_t i = 1; i <= ext_.xcell; ++i)
    for (std::int64_t j = 1; j <= ext_.ycell; ++j)
      for (std::int64_t k = 1; k <= ext_.zcell; ++k)
        f.at(ext_.x0 + i, ext_.y0 + j, ext_.z0 + k) = c[ext_.index(i, j, k)];
}

std::uint64_t expected_gets(const Decomposition& d, int rank) {
  const Extents& e = d.extents.at(static_cast<std::size_t>(rank));
  std::uint64_t n = 0;
  for (Direction dir : kExchangeOrder) {
    if (!d.topo.neighbor(rank, dir)) continue;
    switch (dir) {
      case Direction::South:
      case Direction::North: n += static_cast<std::uint64_t>(e.xcell); break;
      case Direction::West:
      case Direction::East: n += static_cast<std::uint64_t>(e.ycell); break;
      case Direction::Up:
      case Direction::Down: n += static_cast<std::uint64_t>(e.xcell * e.ycell); break;
    }
  }
  return n;
}

std::uint64_t RunReport::total_gets() const {
  std::uint64_t n = 0;
  for (const auto& r : ranks) n += r.gets;
  return n;
}

RunReport run(const GridSpec& grid, const SolverParams& params, const RunOptions& options) {
  validate(grid, params);
  options.runtime.validate();
  const int units = static_cast<int>(options.runtime.num_units);
  const Decomposition decomp = decompose(grid, units);

  RunReport report;
  report.topo = decomp.topo;
  report.ranks.resize(static_cast<std::size_t>(units));
  std::vector<Counters> counters(static_cast<std::size_t>(units));
  std::int64_t iterations_done = 0;
  double final_delta = 0.0;
  if (options.assemble_field) report.field = Field::for_grid(grid);

  report.launch = pgas::launch(options.runtime, [&](pgas::Unit& u) {
    Solver s(u, grid, params, decomp);
    double delta = 0.0;
    std::int64_t it = 0;
    while (it < params.iterations) {
      delta = s.iterate();
      ++it;
      if (it % params.check_interval == 0) {
        const double global = u.allreduce_max(pgas::kTeamAll, delta);
        if (params.convergence_eps && global < *params.convergence_eps) break;
      }
    }
    const double global = u.allreduce_max(pgas::kTeamAll, delta);
    if (report.field) s.copy_interior_to(*report.field);
    const auto r = static_cast<std::size_t>(s.rank());
    counters[r] = s.counters();
    auto& rc = report.ranks[r];
    rc.extents = s.extents();
    for (Direction d : kExchangeOrder) rc.neighbors += decomp.topo.neighbor(s.rank(), d) ? 1 : 0;
    if (s.rank() == 0) {
      iterations_done = it;
      final_delta = global;
    }
    s.release();
  });

  for (std::size_t r = 0; r < counters.size(); ++r) {
    const auto& c = counters[r];
    report.ranks[r].gets = c.gets;
    report.ranks[r].barriers = c.barriers;
    report.compute_seconds += c.compute_seconds;
    report.exchange_seconds += c.get_seconds + c.barrier_seconds;
    report.sync_seconds += c.barrier_seconds;
  }
  report.compute_seconds /= units;
  report.exchange_seconds /= units;
  report.sync_seconds /= units;
  report.iterations_done = iterations_done;
  report.final_max_delta = final_delta;
  return report;
}

}  // namespace heat3d

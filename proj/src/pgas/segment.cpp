#include "pgas/segment.hpp"

#include <algorithm>
#include <cstring>
#include <new>
#include <sstream>

namespace pgas {

Segment::Segment(SegmentId id, SegmentKind kind, TeamId team, std::size_t size_bytes,
                 std::vector<UnitId> units)
    : id_(id), kind_(kind), team_(team), size_bytes_(size_bytes), units_(std::move(units)) {
  std::uint32_t max_index = 0;
  for (auto u : units_) max_index = std::max(max_index, u.index);
  index_of_unit_.assign(units_.empty() ? 0 : max_index + 1, -1);
  for (std::size_t r = 0; r < units_.size(); ++r) index_of_unit_[units_[r].index] = static_cast<std::ptrdiff_t>(r);

  // Never hand out a null region, even for zero-byte segments.
  const std::size_t alloc = std::max<std::size_t>(size_bytes_, kRegionAlignment);
  regions_.reserve(units_.size());
  for (std::size_t r = 0; r < units_.size(); ++r) {
    auto* p = static_cast<std::byte*>(::operator new[](alloc, std::align_val_t{kRegionAlignment}));
    std::memset(p, 0, alloc);
    regions_.emplace_back(p);
  }
}

std::ptrdiff_t Segment::region_index(UnitId u) const {
  if (u.index >= index_of_unit_.size()) return -1;
  return index_of_unit_[u.index];
}

std::span<std::byte> Segment::resolve(const GlobalPointer& gptr, std::size_t nbytes) const {
  if (!exposed()) {
    std::ostringstream os;
    os << id_ << " has been freed";
    throw Error(Errc::SegmentFreed, os.str());
  }
  const auto r = region_index(gptr.unit);
  if (r < 0) {
    std::ostringstream os;
    os << gptr.unit << " has no region in " << id_
       << (kind_ == SegmentKind::Collective ? " (not a member of its team)" : " (not the owner)");
    throw Error(Errc::InvalidTarget, os.str());
  }
  if (gptr.offset > size_bytes_ || nbytes > size_bytes_ - gptr.offset) {
    std::ostringstream os;
    os << "access [" << gptr.offset << ", " << gptr.offset + nbytes << ") exceeds " << id_ << " of "
       << size_bytes_ << " bytes";
    throw Error(Errc::OutOfBounds, os.str());
  }
  return {regions_[static_cast<std::size_t>(r)].get() + gptr.offset, nbytes};
}

std::shared_ptr<Segment> SegmentRegistry::create(SegmentKind kind, TeamId team, std::size_t size_bytes,
                                                 std::vector<UnitId> units) {
  std::unique_lock lock(mutex_);
  const SegmentId id{next_id_++};
  auto seg = std::make_shared<Segment>(id, kind, team, size_bytes, std::move(units));
  live_.emplace(id.id, seg);
  return seg;
}

std::shared_ptr<Segment> SegmentRegistry::find(SegmentId id) const {
  std::shared_lock lock(mutex_);
  auto it = live_.find(id.id);
  return it == live_.end() ? nullptr : it->second;
}

std::shared_ptr<Segment> SegmentRegistry::get(SegmentId id) const {
  std::shared_lock lock(mutex_);
  auto it = live_.find(id.id);
  if (it != live_.end()) return it->second;
  std::ostringstream os;
  if (id.id != 0 && id.id < next_id_) {
    os << id << " has been freed";
    throw Error(Errc::SegmentFreed, os.str());
  }
  os << id << " was never allocated";
  throw Error(Errc::InvalidSegment, os.str());
}

void SegmentRegistry::release(SegmentId id) {
  std::unique_lock lock(mutex_);
  auto it = live_.find(id.id);
  if (it == live_.end()) {
    std::ostringstream os;
    if (id.id != 0 && id.id < next_id_) {
      os << "double free of " << id;
      throw Error(Errc::SegmentFreed, os.str());
    }
    os << "free of unknown " << id;
    throw Error(Errc::InvalidSegment, os.str());
  }
  it->second->exposure_.store(Exposure::Freed, std::memory_order_release);
  live_.erase(it);
}

std::vector<SegmentId> SegmentRegistry::live() const {
  std::shared_lock lock(mutex_);
  std::vector<SegmentId> out;
  out.reserve(live_.size());
  for (const auto& [id, seg] : live_) out.push_back(SegmentId{id});
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t SegmentRegistry::live_count() const {
  std::shared_lock lock(mutex_);
  return live_.size();
}

}  // namespace pgas

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "pgas/types.hpp"

namespace pgas {

/// Minimum alignment of every region handed out by the registry.
inline constexpr std::size_t kRegionAlignment = 64;

/// One registered global memory segment. Collective segments hold one region
/// per team member (in team-rank order); non-collective ones a single region
/// owned by the allocating unit.
class Segment {
 public:
  Segment(SegmentId id, SegmentKind kind, TeamId team, std::size_t size_bytes,
          std::vector<UnitId> units);

  SegmentId id() const { return id_; }
  SegmentKind kind() const { return kind_; }
  TeamId team() const { return team_; }
  std::size_t size_bytes() const { return size_bytes_; }
  const std::vector<UnitId>& units() const { return units_; }

  Exposure exposure() const { return exposure_.load(std::memory_order_acquire); }
  bool exposed() const { return exposure() == Exposure::Exposed; }

  /// Region index of `u`, or -1 if `u` contributes no memory to this segment.
  std::ptrdiff_t region_index(UnitId u) const;

  /// Checked translation of [gptr.offset, gptr.offset + nbytes) to memory.
  std::span<std::byte> resolve(const GlobalPointer& gptr, std::size_t nbytes) const;

  std::int64_t outstanding() const { return outstanding_.load(std::memory_order_acquire); }
  void add_outstanding(std::int64_t delta) { outstanding_.fetch_add(delta, std::memory_order_acq_rel); }

 private:
  friend class SegmentRegistry;

  struct AlignedDelete {
    void operator()(std::byte* p) const { ::operator delete[](p, std::align_val_t{kRegionAlignment}); }
  };

  SegmentId id_;
  SegmentKind kind_;
  TeamId team_;
  std::size_t size_bytes_;
  std::vector<UnitId> units_;
  std::vector<std::ptrdiff_t> index_of_unit_;
  std::vector<std::unique_ptr<std::byte[], AlignedDelete>> regions_;
  std::atomic<Exposure> exposure_{Exposure::Exposed};
  std::atomic<std::int64_t> outstanding_{0};
};

/// Run-wide table of live segments. Ids come from a monotone counter, so an
/// id below the counter that is no longer in the table is known to be freed.
class SegmentRegistry {
 public:
  /// Allocates zero-filled regions and registers the segment as EXPOSED.
  std::shared_ptr<Segment> create(SegmentKind kind, TeamId team, std::size_t size_bytes,
                                  std::vector<UnitId> units);

  /// Live segment or throws (InvalidSegment / SegmentFreed).
  std::shared_ptr<Segment> get(SegmentId id) const;
  std::shared_ptr<Segment> find(SegmentId id) const;

  /// EXPOSED -> FREED transition; throws SegmentFreed on a second call.
  void release(SegmentId id);

  std::vector<SegmentId> live() const;
  std::size_t live_count() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, std::shared_ptr<Segment>> live_;
  std::uint64_t next_id_ = 1;
};

}  // namespace pgas

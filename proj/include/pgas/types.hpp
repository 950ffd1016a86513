#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pgas {

/// Dense unit index in [0, num_units).
struct UnitId {
  std::uint32_t index = 0;

  constexpr auto operator<=>(const UnitId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, UnitId u) {
  return os << "unit " << u.index;
}

/// Opaque team identifier. Team ids are never reused within a run.
struct TeamId {
  std::uint64_t id = 0;

  constexpr auto operator<=>(const TeamId&) const = default;
};

/// The root team; contains every unit and lives for the whole run.
inline constexpr TeamId kTeamAll{0};

struct SegmentId {
  std::uint64_t id = 0;

  constexpr auto operator<=>(const SegmentId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, SegmentId s) {
  return os << "segment " << s.id;
}

enum class SegmentKind { Collective, NonCollective };

enum class Exposure { Exposed, Freed };

enum class RoutingMode { LocalityAware, Oblivious };

const char* to_string(RoutingMode mode);

/// Addresses a byte offset in the region a unit contributes to a segment.
/// Pure value: constructing or transforming one never touches the runtime.
struct GlobalPointer {
  SegmentId segment;
  UnitId unit;
  std::uint64_t offset = 0;

  constexpr bool operator==(const GlobalPointer&) const = default;
};

/// Rebinds the pointer to another unit's region of the same segment.
constexpr GlobalPointer gptr_setunit(GlobalPointer g, UnitId unit) {
  g.unit = unit;
  return g;
}

constexpr GlobalPointer gptr_incaddr(GlobalPointer g, std::uint64_t delta) {
  g.offset += delta;
  return g;
}

enum class Errc {
  InvalidConfig,
  NotInRuntime,
  NotMember,
  InvalidTeam,
  InvalidSegment,
  SegmentFreed,
  OutOfBounds,
  InvalidTarget,
  NotOwner,
  LiveSegments,
  OutstandingOps,
  InvalidHandle,
  DeliveryFailed,
  CollectiveMismatch,
  InvalidArgument,
  NotSameNode,
  Aborted,
};

const char* to_string(Errc code);

/// Every runtime failure is reported as a pgas::Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pgas

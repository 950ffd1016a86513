#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <type_traits>
#include <vector>

#include "pgas/config.hpp"
#include "pgas/segment.hpp"
#include "pgas/sync.hpp"
#include "pgas/topology.hpp"
#include "pgas/transport.hpp"
#include "pgas/types.hpp"

namespace pgas {

enum class OpKind { Put, Get };

/// Completion token of a non-blocking put/get. Consumed by exactly one
/// wait()/waitall(); waiting on it again is an InvalidHandle error.
struct OpHandle {
  UnitId origin;
  UnitId target;
  OpKind kind = OpKind::Put;
  std::uint64_t seq = 0;
  SegmentId segment;
};

/// Per-unit operation counters, written only by the owning unit.
struct UnitStats {
  std::uint64_t puts = 0;
  std::uint64_t gets = 0;
  std::uint64_t direct_copies = 0;
  std::uint64_t flushes = 0;
  std::uint64_t barriers = 0;
  std::uint64_t allreduces = 0;
  std::uint64_t envelopes = 0;  // messages generated by this unit's ops, replies included
};

struct Team {
  TeamId id;
  TeamId parent;
  std::vector<UnitId> members;
  std::vector<std::ptrdiff_t> rank_of;  // by unit index, -1 for non-members
  TeamBarrier barrier;
  Rendezvous rendezvous;
  std::mutex live_mutex;
  std::vector<SegmentId> live_segments;  // collective allocation context

  Team(TeamId id, TeamId parent, std::vector<UnitId> members, std::uint32_t num_units, const AbortSignal& abort);

  std::ptrdiff_t rank(UnitId u) const {
    return u.index < rank_of.size() ? rank_of[u.index] : -1;
  }
  bool contains(UnitId u) const { return rank(u) >= 0; }
};

class Unit;

/// State shared by all units of one launch.
class Runtime {
 public:
  explicit Runtime(const RuntimeConfig& config);
  ~Runtime();

  const RuntimeConfig& config() const { return config_; }
  const Topology& topology() const { return topology_; }
  SegmentRegistry& segments() { return segments_; }
  Transport& transport() { return *transport_; }
  AbortSignal& abort_signal() { return abort_; }

  std::shared_ptr<Team> team(TeamId id) const;
  std::shared_ptr<Team> add_team(TeamId parent, std::vector<UnitId> members);
  void remove_team(TeamId id);
  std::size_t live_team_count() const;

  /// Raises the abort signal and wakes every blocked waiter.
  void abort();

  /// Frees every segment still exposed; returns how many there were.
  std::size_t release_leaked_segments();

 private:
  RuntimeConfig config_;
  Topology topology_;
  AbortSignal abort_;
  SegmentRegistry segments_;
  std::unique_ptr<Transport> transport_;

  mutable std::mutex teams_mutex_;
  std::map<TeamId, std::shared_ptr<Team>> teams_;
  std::uint64_t next_team_id_ = 1;
};

/// A unit's handle on the runtime. Owned by the unit's thread; never share
/// it with another thread.
class Unit {
 public:
  Unit(Runtime& rt, UnitId id);

  Unit(const Unit&) = delete;
  Unit& operator=(const Unit&) = delete;

  UnitId myid() const { return id_; }
  std::uint32_t size() const { return rt_.config().num_units; }
  std::uint32_t team_size(TeamId team) const;
  /// Team-relative rank of this unit, or -1 if it is not a member.
  std::ptrdiff_t team_rank(TeamId team) const;
  std::vector<UnitId> team_members(TeamId team) const;

  const Topology& topology() const { return rt_.topology(); }
  RoutingMode routing() const { return rt_.config().routing; }
  HopClass hop_to(UnitId other) const { return classify(rt_.topology(), id_, other); }

  // Teams and global memory.
  TeamId team_create(TeamId parent, std::span<const UnitId> members);
  void team_destroy(TeamId team);
  GlobalPointer team_memalloc_aligned(TeamId team, std::size_t nbytes);
  void team_memfree(TeamId team, const GlobalPointer& gptr);
  GlobalPointer memalloc(std::size_t nbytes);
  void memfree(const GlobalPointer& gptr);
  /// This unit's own memory behind `gptr` (gptr.unit must be myid()).
  std::span<std::byte> local_region(const GlobalPointer& gptr, std::size_t nbytes);

  // One-sided transfers.
  void put_blocking(const GlobalPointer& gptr, std::span<const std::byte> src);
  void get_blocking(std::span<std::byte> dst, const GlobalPointer& gptr);
  OpHandle put(const GlobalPointer& gptr, std::span<const std::byte> src);
  OpHandle get(std::span<std::byte> dst, const GlobalPointer& gptr);
  void wait(const OpHandle& h);
  void waitall(std::span<const OpHandle> hs);
  /// State of a not-yet-consumed handle.
  OpState state(const OpHandle& h) const;

  template <class T>
  void put_blocking(const GlobalPointer& gptr, std::span<const T> src) {
    put_blocking(gptr, std::as_bytes(src));
  }
  template <class T>
    requires(!std::is_const_v<T>)
  void get_blocking(std::span<T> dst, const GlobalPointer& gptr) {
    get_blocking(std::as_writable_bytes(dst), gptr);
  }

  // Collectives.
  void barrier(TeamId team);
  double allreduce_max(TeamId team, double value);

  UnitStats stats() const;
  Runtime& runtime() { return rt_; }

 private:
  std::shared_ptr<Team> member_team(TeamId team, const char* op) const;
  void check_access(const GlobalPointer& gptr, std::size_t nbytes) const;
  std::uint64_t send_put(const GlobalPointer& gptr, std::span<const std::byte> src);
  std::uint64_t send_get(std::span<std::byte> dst, const GlobalPointer& gptr);

  Runtime& rt_;
  UnitId id_;
  UnitStats stats_;
};

struct LaunchReport {
  std::vector<int> exit_status;
  std::vector<UnitStats> unit_stats;
  TransportStats transport;
  std::vector<TraceRecord> trace;
  /// Segments still exposed when the units returned; freed by teardown.
  std::size_t leaked_segments = 0;
};

/// Runs `unit_main` on `config.num_units` concurrent units and tears the
/// runtime down once all of them have returned. A unit that throws aborts
/// the whole run; launch then throws Error(Aborted) naming that unit.
LaunchReport launch(const RuntimeConfig& config, const std::function<int(Unit&)>& unit_main);

template <class F>
  requires std::invocable<F&, Unit&> && std::is_void_v<std::invoke_result_t<F&, Unit&>>
LaunchReport launch(const RuntimeConfig& config, F&& unit_main) {
  return launch(config, std::function<int(Unit&)>([&unit_main](Unit& u) {
                  unit_main(u);
                  return 0;
                }));
}

/// The calling thread's unit; throws Error(NotInRuntime) outside a launch.
Unit& this_unit();
UnitId myid();
std::uint32_t size();

}  // namespace pgas

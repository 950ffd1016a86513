// Teams and global memory: collective/non-collective allocation with the
// "allocated means exposed" contract. There is no epoch API; a segment is
// accessible by every unit of its scope from allocation until free.

#include <algorithm>
#include <sstream>

#include "pgas/runtime.hpp"

namespace pgas {

namespace {

struct AllocRequest {
  std::size_t nbytes;
};

struct FreeRequest {
  SegmentId segment;
};

struct CreateRequest {
  std::vector<UnitId> members;
};

struct DestroyRequest {
  TeamId team;
};

template <class T>
const T& contribution(const std::any& slot, const char* op) {
  const T* p = std::any_cast<T>(&slot);
  if (p == nullptr) {
    throw Error(Errc::CollectiveMismatch,
                std::string("collective mismatch: members entered different collectives (expected ") + op + ")");
  }
  return *p;
}

std::string describe(const std::vector<UnitId>& units) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < units.size(); ++i) os << (i ? "," : "") << units[i].index;
  os << '}';
  return os.str();
}

}  // namespace

std::shared_ptr<Team> Unit::member_team(TeamId team, const char* op) const {
  auto t = rt_.team(team);
  if (!t->contains(id_)) {
    std::ostringstream os;
    os << op << ": " << id_ << " is not a member of team " << team.id;
    throw Error(Errc::NotMember, os.str());
  }
  return t;
}

std::uint32_t Unit::team_size(TeamId team) const {
  return static_cast<std::uint32_t>(rt_.team(team)->members.size());
}

std::ptrdiff_t Unit::team_rank(TeamId team) const { return rt_.team(team)->rank(id_); }

std::vector<UnitId> Unit::team_members(TeamId team) const { return rt_.team(team)->members; }

TeamId Unit::team_create(TeamId parent, std::span<const UnitId> members) {
  auto p = member_team(parent, "team_create");
  std::vector<UnitId> list(members.begin(), members.end());
  std::vector<UnitId> sorted = list;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(Errc::InvalidArgument, "team_create: duplicate member in " + describe(list));
  }
  for (auto u : list) {
    if (!p->contains(u)) {
      std::ostringstream os;
      os << "team_create: " << u << " is not a member of parent team " << parent.id;
      throw Error(Errc::NotMember, os.str());
    }
  }
  if (list.empty()) throw Error(Errc::InvalidArgument, "team_create: empty member list");

  auto result = p->rendezvous.exchange(
      static_cast<std::size_t>(p->rank(id_)), CreateRequest{list}, [&](std::vector<std::any>& slots) {
        const auto& first = contribution<CreateRequest>(slots.front(), "team_create").members;
        for (const auto& s : slots) {
          if (contribution<CreateRequest>(s, "team_create").members != first) {
            throw Error(Errc::CollectiveMismatch, "team_create: members passed different member lists");
          }
        }
        return std::any(rt_.add_team(parent, first)->id);
      });
  return std::any_cast<TeamId>(result);
}

void Unit::team_destroy(TeamId team) {
  if (team == kTeamAll) {
    throw Error(Errc::InvalidTeam, "team_destroy: the root team is owned by launch and cannot be destroyed");
  }
  auto t = member_team(team, "team_destroy");
  t->rendezvous.exchange(static_cast<std::size_t>(t->rank(id_)), DestroyRequest{team},
                         [&](std::vector<std::any>& slots) {
                           for (const auto& s : slots) contribution<DestroyRequest>(s, "team_destroy");
                           std::lock_guard lock(t->live_mutex);
                           if (!t->live_segments.empty()) {
                             std::ostringstream os;
                             os << "team_destroy: team " << team.id << " still owns live "
                                << t->live_segments.front();
                             throw Error(Errc::LiveSegments, os.str());
                           }
                           rt_.remove_team(team);
                           return std::any{};
                         });
}

GlobalPointer Unit::team_memalloc_aligned(TeamId team, std::size_t nbytes) {
  auto t = member_team(team, "team_memalloc_aligned");
  auto result = t->rendezvous.exchange(
      static_cast<std::size_t>(t->rank(id_)), AllocRequest{nbytes}, [&](std::vector<std::any>& slots) {
        const auto size = contribution<AllocRequest>(slots.front(), "team_memalloc_aligned").nbytes;
        for (const auto& s : slots) {
          if (contribution<AllocRequest>(s, "team_memalloc_aligned").nbytes != size) {
            throw Error(Errc::CollectiveMismatch, "team_memalloc_aligned: members requested different sizes");
          }
        }
        auto seg = rt_.segments().create(SegmentKind::Collective, team, size, t->members);
        std::lock_guard lock(t->live_mutex);
        t->live_segments.push_back(seg->id());
        return std::any(seg->id());
      });
  return GlobalPointer{std::any_cast<SegmentId>(result), t->members.front(), 0};
}

void Unit::team_memfree(TeamId team, const GlobalPointer& gptr) {
  auto t = member_team(team, "team_memfree");
  t->rendezvous.exchange(
      static_cast<std::size_t>(t->rank(id_)), FreeRequest{gptr.segment}, [&](std::vector<std::any>& slots) {
        for (const auto& s : slots) {
          if (contribution<FreeRequest>(s, "team_memfree").segment != gptr.segment) {
            throw Error(Errc::CollectiveMismatch, "team_memfree: members passed different segments");
          }
        }
        auto seg = rt_.segments().get(gptr.segment);
        if (seg->kind() != SegmentKind::Collective || seg->team() != team) {
          std::ostringstream os;
          os << "team_memfree: " << gptr.segment << " was not allocated collectively on team " << team.id;
          throw Error(Errc::InvalidSegment, os.str());
        }
        if (seg->outstanding() > 0) {
          std::ostringstream os;
          os << "team_memfree: " << seg->outstanding() << " non-blocking operation(s) on " << gptr.segment
             << " have not been waited for";
          throw Error(Errc::OutstandingOps, os.str());
        }
        rt_.segments().release(gptr.segment);
        std::lock_guard lock(t->live_mutex);
        std::erase(t->live_segments, gptr.segment);
        return std::any{};
      });
}

GlobalPointer Unit::memalloc(std::size_t nbytes) {
  auto seg = rt_.segments().create(SegmentKind::NonCollective, kTeamAll, nbytes, {id_});
  return GlobalPointer{seg->id(), id_, 0};
}

void Unit::memfree(const GlobalPointer& gptr) {
  auto seg = rt_.segments().get(gptr.segment);
  if (seg->kind() != SegmentKind::NonCollective) {
    std::ostringstream os;
    os << "memfree: " << gptr.segment << " is collective; use team_memfree";
    throw Error(Errc::InvalidSegment, os.str());
  }
  if (seg->units().front() != id_) {
    std::ostringstream os;
    os << "memfree: " << gptr.segment << " is owned by " << seg->units().front() << ", not " << id_;
    throw Error(Errc::NotOwner, os.str());
  }
  if (seg->outstanding() > 0) {
    std::ostringstream os;
    os << "memfree: " << seg->outstanding() << " non-blocking operation(s) on " << gptr.segment
       << " have not been waited for";
    throw Error(Errc::OutstandingOps, os.str());
  }
  rt_.segments().release(gptr.segment);
}

std::span<std::byte> Unit::local_region(const GlobalPointer& gptr, std::size_t nbytes) {
  if (gptr.unit != id_) {
    std::ostringstream os;
    os << "local_region: pointer targets " << gptr.unit << ", caller is " << id_;
    throw Error(Errc::InvalidTarget, os.str());
  }
  return rt_.segments().get(gptr.segment)->resolve(gptr, nbytes);
}

}  // namespace pgas

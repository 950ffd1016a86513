#include "pgas/runtime.hpp"

#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace pgas {

namespace {

thread_local Unit* tls_unit = nullptr;

}  // namespace

const char* to_string(RoutingMode mode) {
  return mode == RoutingMode::LocalityAware ? "locality_aware" : "oblivious";
}

const char* to_string(Errc code) {
  switch (code) {
    case Errc::InvalidConfig: return "invalid config";
    case Errc::NotInRuntime: return "not in runtime";
    case Errc::NotMember: return "not a member";
    case Errc::InvalidTeam: return "invalid team";
    case Errc::InvalidSegment: return "invalid segment";
    case Errc::SegmentFreed: return "segment freed";
    case Errc::OutOfBounds: return "out of bounds";
    case Errc::InvalidTarget: return "invalid target";
    case Errc::NotOwner: return "not owner";
    case Errc::LiveSegments: return "live segments";
    case Errc::OutstandingOps: return "outstanding operations";
    case Errc::InvalidHandle: return "invalid handle";
    case Errc::DeliveryFailed: return "delivery failed";
    case Errc::CollectiveMismatch: return "collective mismatch";
    case Errc::InvalidArgument: return "invalid argument";
    case Errc::NotSameNode: return "not same node";
    case Errc::Aborted: return "aborted";
  }
  return "?";
}

Team::Team(TeamId id_, TeamId parent_, std::vector<UnitId> members_, std::uint32_t num_units,
           const AbortSignal& abort)
    : id(id_),
      parent(parent_),
      members(std::move(members_)),
      rank_of(num_units, -1),
      barrier(members.size(), abort),
      rendezvous(members.size(), abort) {
  for (std::size_t r = 0; r < members.size(); ++r) rank_of[members[r].index] = static_cast<std::ptrdiff_t>(r);
}

Runtime::Runtime(const RuntimeConfig& config) : config_(config), topology_(config.topology()) {
  config_.validate();
  transport_ = std::make_unique<Transport>(config_, segments_, abort_);
  std::vector<UnitId> all;
  all.reserve(config_.num_units);
  for (std::uint32_t u = 0; u < config_.num_units; ++u) all.push_back(UnitId{u});
  teams_.emplace(kTeamAll, std::make_shared<Team>(kTeamAll, kTeamAll, std::move(all), config_.num_units, abort_));
}

Runtime::~Runtime() = default;

std::shared_ptr<Team> Runtime::team(TeamId id) const {
  std::lock_guard lock(teams_mutex_);
  auto it = teams_.find(id);
  if (it == teams_.end()) {
    throw Error(Errc::InvalidTeam, "team " + std::to_string(id.id) + " does not exist");
  }
  return it->second;
}

std::shared_ptr<Team> Runtime::add_team(TeamId parent, std::vector<UnitId> members) {
  std::lock_guard lock(teams_mutex_);
  const TeamId id{next_team_id_++};
  auto t = std::make_shared<Team>(id, parent, std::move(members), config_.num_units, abort_);
  teams_.emplace(id, t);
  return t;
}

void Runtime::remove_team(TeamId id) {
  std::lock_guard lock(teams_mutex_);
  teams_.erase(id);
}

std::size_t Runtime::live_team_count() const {
  std::lock_guard lock(teams_mutex_);
  return teams_.size();
}

void Runtime::abort() {
  abort_.raise();
  std::vector<std::shared_ptr<Team>> teams;
  {
    std::lock_guard lock(teams_mutex_);
    for (auto& [id, t] : teams_) teams.push_back(t);
  }
  for (auto& t : teams) {
    t->barrier.wake_all();
    t->rendezvous.wake_all();
  }
  transport_->wake_all();
}

std::size_t Runtime::release_leaked_segments() {
  const auto leaked = segments_.live();
  for (auto id : leaked) {
    std::cerr << "[pgas] teardown: freeing leaked " << id << '\n';
    segments_.release(id);
  }
  std::lock_guard lock(teams_mutex_);
  for (auto& [id, t] : teams_) {
    std::lock_guard live_lock(t->live_mutex);
    t->live_segments.clear();
  }
  return leaked.size();
}

Unit::Unit(Runtime& rt, UnitId id) : rt_(rt), id_(id) {}

UnitStats Unit::stats() const {
  auto s = stats_;
  s.envelopes = rt_.transport().envelopes_for(id_);
  return s;
}

Unit& this_unit() {
  if (tls_unit == nullptr) throw Error(Errc::NotInRuntime, "no runtime is active on this thread");
  return *tls_unit;
}

UnitId myid() { return this_unit().myid(); }

std::uint32_t size() { return this_unit().size(); }

LaunchReport launch(const RuntimeConfig& config, const std::function<int(Unit&)>& unit_main) {
  try {
    config.validate();
  } catch (const Error& e) {
    throw Error(Errc::InvalidConfig, std::string("launch refused: ") + e.what());
  }
  Runtime rt(config);
  const auto n = config.num_units;

  std::vector<std::unique_ptr<Unit>> units;
  units.reserve(n);
  for (std::uint32_t u = 0; u < n; ++u) units.push_back(std::make_unique<Unit>(rt, UnitId{u}));

  LaunchReport report;
  report.exit_status.assign(n, 0);
  std::mutex failure_mutex;
  std::optional<std::string> failure;

  auto record_failure = [&](UnitId u, const std::string& what) {
    std::lock_guard lock(failure_mutex);
    std::cerr << "[unit " << u.index << "] error: " << what << '\n';
    if (!failure) {
      std::ostringstream os;
      os << "unit " << u.index << " failed: " << what;
      failure = os.str();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(n);
  for (std::uint32_t u = 0; u < n; ++u) {
    threads.emplace_back([&, u] {
      Unit& self = *units[u];
      tls_unit = &self;
      try {
        report.exit_status[u] = unit_main(self);
      } catch (const Error& e) {
        // Units released by the abort of another unit are not the culprit.
        if (!(e.code() == Errc::Aborted && rt.abort_signal().raised())) {
          record_failure(self.myid(), e.what());
          rt.abort();
        }
        report.exit_status[u] = -1;
      } catch (const std::exception& e) {
        record_failure(self.myid(), e.what());
        rt.abort();
        report.exit_status[u] = -1;
      } catch (...) {
        record_failure(self.myid(), "unknown exception");
        rt.abort();
        report.exit_status[u] = -1;
      }
      tls_unit = nullptr;
    });
  }
  for (auto& t : threads) t.join();

  if (failure) {
    rt.release_leaked_segments();
    throw Error(Errc::Aborted, *failure);
  }

  rt.transport().drain();
  report.leaked_segments = rt.release_leaked_segments();
  report.unit_stats.reserve(n);
  for (auto& u : units) report.unit_stats.push_back(u->stats());
  report.transport = rt.transport().stats();
  report.trace = rt.transport().trace();
  return report;
}

}  // namespace pgas

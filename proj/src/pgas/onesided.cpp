// One-sided transfers and collectives.
//
// Routing: a blocking transfer between two units of the same node in
// locality-aware mode is a direct memory copy; every other transfer goes
// over the message path and a blocking one is completed with flush(target).
// Non-blocking transfers always take the message path. wait() is a flush of
// the handle's target, so it also completes every earlier op to that target.

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "pgas/runtime.hpp"

namespace pgas {

void Unit::check_access(const GlobalPointer& gptr, std::size_t nbytes) const {
  if (gptr.unit.index >= size()) {
    std::ostringstream os;
    os << "global pointer targets " << gptr.unit << " outside the run of " << size() << " units";
    throw Error(Errc::InvalidTarget, os.str());
  }
  rt_.segments().get(gptr.segment)->resolve(gptr, nbytes);
}

std::uint64_t Unit::send_put(const GlobalPointer& gptr, std::span<const std::byte> src) {
  Envelope env;
  env.kind = EnvelopeKind::Put;
  env.origin = id_;
  env.target = gptr.unit;
  env.segment = gptr.segment;
  env.offset = gptr.offset;
  env.payload.assign(src.begin(), src.end());
  return rt_.transport().send(std::move(env));
}

std::uint64_t Unit::send_get(std::span<std::byte> dst, const GlobalPointer& gptr) {
  Envelope env;
  env.kind = EnvelopeKind::GetRequest;
  env.origin = id_;
  env.target = gptr.unit;
  env.segment = gptr.segment;
  env.offset = gptr.offset;
  env.nbytes = dst.size();
  return rt_.transport().send(std::move(env), dst);
}

void Unit::put_blocking(const GlobalPointer& gptr, std::span<const std::byte> src) {
  check_access(gptr, src.size());
  ++stats_.puts;
  auto& tp = rt_.transport();
  if (tp.direct_eligible(id_, gptr.unit)) {
    tp.direct_put(id_, gptr, src);
    ++stats_.direct_copies;
    return;
  }
  const auto seq = send_put(gptr, src);
  tp.flush(id_, gptr.unit);
  ++stats_.flushes;
  auto [st, why] = tp.consume(id_, gptr.unit, seq);
  if (st != OpState::Complete) throw Error(Errc::DeliveryFailed, "put_blocking: " + why);
}

void Unit::get_blocking(std::span<std::byte> dst, const GlobalPointer& gptr) {
  check_access(gptr, dst.size());
  ++stats_.gets;
  auto& tp = rt_.transport();
  if (tp.direct_eligible(id_, gptr.unit)) {
    tp.direct_get(id_, dst, gptr);
    ++stats_.direct_copies;
    return;
  }
  const auto seq = send_get(dst, gptr);
  tp.flush(id_, gptr.unit);
  ++stats_.flushes;
  auto [st, why] = tp.consume(id_, gptr.unit, seq);
  if (st != OpState::Complete) throw Error(Errc::DeliveryFailed, "get_blocking: " + why);
}

OpHandle Unit::put(const GlobalPointer& gptr, std::span<const std::byte> src) {
  check_access(gptr, src.size());
  ++stats_.puts;
  auto seg = rt_.segments().get(gptr.segment);
  const auto seq = send_put(gptr, src);
  seg->add_outstanding(1);
  return OpHandle{id_, gptr.unit, OpKind::Put, seq, gptr.segment};
}

OpHandle Unit::get(std::span<std::byte> dst, const GlobalPointer& gptr) {
  check_access(gptr, dst.size());
  ++stats_.gets;
  auto seg = rt_.segments().get(gptr.segment);
  const auto seq = send_get(dst, gptr);
  seg->add_outstanding(1);
  return OpHandle{id_, gptr.unit, OpKind::Get, seq, gptr.segment};
}

OpState Unit::state(const OpHandle& h) const {
  if (h.origin != id_) throw Error(Errc::InvalidHandle, "handle belongs to another unit");
  return rt_.transport().state(id_, h.target, h.seq);
}

void Unit::wait(const OpHandle& h) { waitall(std::span<const OpHandle>(&h, 1)); }

void Unit::waitall(std::span<const OpHandle> hs) {
  auto& tp = rt_.transport();
  for (const auto& h : hs) {
    if (h.origin != id_) throw Error(Errc::InvalidHandle, "handle belongs to another unit");
    if (!tp.has_op(id_, h.target, h.seq)) {
      throw Error(Errc::InvalidHandle, "wait on an unknown or already consumed handle");
    }
  }
  std::unordered_set<std::uint32_t> flushed;
  for (const auto& h : hs) {
    if (flushed.insert(h.target.index).second) {
      tp.flush(id_, h.target);
      ++stats_.flushes;
    }
  }
  std::string failure;
  for (const auto& h : hs) {
    auto [st, why] = tp.consume(id_, h.target, h.seq);
    if (auto seg = rt_.segments().find(h.segment)) seg->add_outstanding(-1);
    if (st == OpState::Failed && failure.empty()) failure = why;
  }
  if (!failure.empty()) throw Error(Errc::DeliveryFailed, "wait: " + failure);
}

void Unit::barrier(TeamId team) {
  auto t = member_team(team, "barrier");
  ++stats_.barriers;
  t->barrier.arrive_and_wait();
}

double Unit::allreduce_max(TeamId team, double value) {
  auto t = member_team(team, "allreduce_max");
  ++stats_.allreduces;
  auto result = t->rendezvous.exchange(static_cast<std::size_t>(t->rank(id_)), value,
                                       [](std::vector<std::any>& slots) {
                                         double best = -INFINITY;
                                         for (const auto& s : slots) {
                                           const double* v = std::any_cast<double>(&s);
                                           if (v == nullptr) {
                                             throw Error(Errc::CollectiveMismatch,
                                                         "allreduce_max: members entered different collectives");
                                           }
                                           if (std::isnan(*v)) {
                                             throw Error(Errc::InvalidArgument, "allreduce_max: NaN contribution");
                                           }
                                           best = std::max(best, *v);
                                         }
                                         return std::any(best);
                                       });
  return std::any_cast<double>(result);
}

}  // namespace pgas

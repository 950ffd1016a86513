#include "pgas/sync.hpp"

namespace pgas {

void TeamBarrier::arrive_and_wait() {
  std::unique_lock lock(mutex_);
  abort_.throw_if_raised();
  const auto gen = generation_;
  if (++arrived_ == parties_) {
    arrived_ = 0;
    ++generation_;
    lock.unlock();
    cv_.notify_all();
    return;
  }
  cv_.wait(lock, [&] { return generation_ != gen || abort_.raised(); });
  if (generation_ == gen) abort_.throw_if_raised();
}

void TeamBarrier::wake_all() {
  { std::lock_guard lock(mutex_); }
  cv_.notify_all();
}

std::any Rendezvous::exchange(std::size_t rank, std::any contribution, const Combine& combine) {
  std::unique_lock lock(mutex_);
  abort_.throw_if_raised();
  const auto gen = generation_;
  slots_[rank] = std::move(contribution);
  if (++arrived_ == parties_) {
    Outcome out;
    try {
      out.value = combine(slots_);
    } catch (const Error& e) {
      out.error = e.code();
      out.message = e.what();
    } catch (const std::exception& e) {
      out.error = Errc::InvalidArgument;
      out.message = e.what();
    }
    for (auto& s : slots_) s.reset();
    outcome_ = std::move(out);
    arrived_ = 0;
    ++generation_;
    lock.unlock();
    cv_.notify_all();
    lock.lock();
  } else {
    cv_.wait(lock, [&] { return generation_ != gen || abort_.raised(); });
    if (generation_ == gen) abort_.throw_if_raised();
  }
  // outcome_ cannot be overwritten before every party has read it: the next
  // collective on this team needs all parties, including this one, to arrive.
  if (outcome_.error) throw Error(*outcome_.error, outcome_.message);
  return outcome_.value;
}

void Rendezvous::wake_all() {
  { std::lock_guard lock(mutex_); }
  cv_.notify_all();
}

}  // namespace pgas

#pragma once

#include <any>
#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pgas/types.hpp"

namespace pgas {

/// Set once when any unit fails; every blocking wait in the runtime observes
/// it and throws Error(Aborted) so that no unit is left waiting forever.
class AbortSignal {
 public:
  bool raised() const noexcept { return raised_.load(std::memory_order_acquire); }
  void raise() noexcept { raised_.store(true, std::memory_order_release); }
  void throw_if_raised() const {
    if (raised()) throw Error(Errc::Aborted, "run aborted by a failing unit");
  }

 private:
  std::atomic<bool> raised_{false};
};

/// Two-phase counter barrier (arrive, then release by generation bump).
class TeamBarrier {
 public:
  TeamBarrier(std::size_t parties, const AbortSignal& abort) : parties_(parties), abort_(abort) {}

  void arrive_and_wait();
  void wake_all();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t parties_;
  std::size_t arrived_ = 0;
  std::uint64_t generation_ = 0;
  const AbortSignal& abort_;
};

/// All-to-all rendezvous for collectives that carry data. Every party
/// deposits a contribution indexed by its team rank; the last one to arrive
/// runs the combine step and its result (or its Error) is handed to all.
class Rendezvous {
 public:
  using Combine = std::function<std::any(std::vector<std::any>&)>;

  Rendezvous(std::size_t parties, const AbortSignal& abort)
      : parties_(parties), abort_(abort), slots_(parties) {}

  std::any exchange(std::size_t rank, std::any contribution, const Combine& combine);
  void wake_all();

 private:
  struct Outcome {
    std::any value;
    std::optional<Errc> error;
    std::string message;
  };

  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t parties_;
  const AbortSignal& abort_;
  std::vector<std::any> slots_;
  std::size_t arrived_ = 0;
  std::uint64_t generation_ = 0;
  Outcome outcome_;
};

}  // namespace pgas

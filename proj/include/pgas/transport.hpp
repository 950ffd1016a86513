#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "pgas/config.hpp"
#include "pgas/segment.hpp"
#include "pgas/sync.hpp"
#include "pgas/topology.hpp"
#include "pgas/types.hpp"

namespace pgas {

using Clock = std::chrono::steady_clock;

enum class EnvelopeKind : std::uint8_t { Put = 0, GetRequest = 1, GetReply = 2, Ack = 3 };

inline constexpr std::size_t kNumEnvelopeKinds = 4;

const char* to_string(EnvelopeKind kind);

enum class OpState { Pending, Complete, Failed };

/// One message on the inter-unit path. `seq` is assigned per (origin, target)
/// pair by Transport::send; replies carry the sequence number of the request.
struct Envelope {
  EnvelopeKind kind = EnvelopeKind::Put;
  UnitId origin;
  UnitId target;
  SegmentId segment;
  std::uint64_t offset = 0;
  std::uint64_t nbytes = 0;
  std::vector<std::byte> payload;
  std::uint64_t seq = 0;

  // Filled in by the transport.
  HopClass hop = HopClass::IntraNode;
  double cost_seconds = 0.0;
  Clock::time_point ready_at{};
  Errc error_code = Errc::DeliveryFailed;
  std::string error;  // non-empty on a failed reply
};

struct TransportStats {
  std::uint64_t envelopes = 0;
  std::array<std::uint64_t, kNumEnvelopeKinds> by_kind{};
  std::array<std::uint64_t, kNumHopClasses> by_hop{};
  double charged_seconds = 0.0;
  std::uint64_t direct_copies = 0;
  std::uint64_t direct_bytes = 0;
  std::uint64_t flushes = 0;
};

/// A message as observed when the target side applied it (trace mode only).
struct TraceRecord {
  EnvelopeKind kind;
  UnitId origin;
  UnitId target;
  std::uint64_t seq;
  HopClass hop;
  std::uint64_t payload_bytes;
  double cost_seconds;
  std::uint64_t first_payload_word;  // first 8 payload bytes, 0 if shorter
};

/// Moves bytes between units. Same-node transfers in locality-aware mode are
/// plain memory copies on the caller's thread; everything else becomes an
/// Envelope served by the target node's service worker (passive target) and
/// answered with an ACK or GET_REPLY.
class Transport {
 public:
  Transport(const RuntimeConfig& config, SegmentRegistry& segments, const AbortSignal& abort);
  ~Transport();

  Transport(const Transport&) = delete;
  Transport& operator=(const Transport&) = delete;

  const Topology& topology() const { return topology_; }
  RoutingMode routing() const { return routing_; }
  const LatencyModel& latency() const { return latency_; }
  HopClass classify(UnitId origin, UnitId target) const { return pgas::classify(topology_, origin, target); }

  /// True when a transfer between the pair may bypass the message path.
  bool direct_eligible(UnitId origin, UnitId target) const {
    return routing_ == RoutingMode::LocalityAware && topology_.same_node(origin, target);
  }

  /// Byte-exact copy on the calling thread, no envelope, no latency charged.
  void direct_put(UnitId origin, const GlobalPointer& dst, std::span<const std::byte> src);
  void direct_get(UnitId origin, std::span<std::byte> dst, const GlobalPointer& src);

  /// Queues a PUT or GET_REQUEST from `env.origin`. `get_dst` receives the
  /// reply payload of a GET and must stay valid until the op is flushed.
  /// Returns the per-(origin, target) sequence number.
  std::uint64_t send(Envelope env, std::span<std::byte> get_dst = {});

  /// Returns once every envelope previously sent from origin to target has
  /// been applied and answered. Called on the origin's thread only.
  void flush(UnitId origin, UnitId target);

  OpState state(UnitId origin, UnitId target, std::uint64_t seq) const;
  /// Removes the op record. Returns its final state and failure message.
  std::pair<OpState, std::string> consume(UnitId origin, UnitId target, std::uint64_t seq);
  bool has_op(UnitId origin, UnitId target, std::uint64_t seq) const;

  /// Waits until no envelope is queued or in flight anywhere.
  void drain();
  std::uint64_t in_flight() const { return in_flight_.load(std::memory_order_acquire); }

  TransportStats stats() const;
  std::uint64_t envelopes_for(UnitId origin) const;
  std::vector<TraceRecord> trace() const;

  void wake_all();

 private:
  struct OpRecord {
    EnvelopeKind kind;
    std::span<std::byte> dst;
    OpState state = OpState::Pending;
    std::string error;
  };

  // Origin-side state. Only the owning unit's thread touches `ops`,
  // `last_sent` and `completed`; the inbox is filled by service workers.
  struct Endpoint {
    std::vector<std::uint64_t> last_sent;
    std::vector<std::uint64_t> completed;
    std::unordered_map<std::uint64_t, OpRecord> ops;  // key: (target << 40) | seq

    std::mutex inbox_mutex;
    std::deque<Envelope> inbox;
    std::atomic<std::uint64_t> arrivals{0};
  };

  struct ServiceQueue {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<Envelope> queue;
    bool sleeping = false;
    bool stop = false;
    std::thread worker;
  };

  static std::uint64_t op_key(UnitId target, std::uint64_t seq) {
    return (static_cast<std::uint64_t>(target.index) << 40) | seq;
  }

  void serve_loop(ServiceQueue& q);
  Envelope serve(Envelope& request);
  void deliver_reply(Envelope reply);
  void process_inbox(Endpoint& ep);
  void charge(const Envelope& env);
  void pace_until(Clock::time_point t) const;
  void record_trace(const Envelope& env);

  Topology topology_;
  RoutingMode routing_;
  LatencyModel latency_;
  bool realize_latency_;
  bool trace_enabled_;
  SegmentRegistry& segments_;
  const AbortSignal& abort_;

  std::vector<std::unique_ptr<Endpoint>> endpoints_;
  std::vector<std::unique_ptr<ServiceQueue>> services_;

  std::atomic<std::uint64_t> in_flight_{0};
  std::atomic<std::uint64_t> envelopes_{0};
  std::array<std::atomic<std::uint64_t>, kNumEnvelopeKinds> by_kind_{};
  std::array<std::atomic<std::uint64_t>, kNumHopClasses> by_hop_{};
  std::atomic<double> charged_seconds_{0.0};
  std::atomic<std::uint64_t> direct_copies_{0};
  std::atomic<std::uint64_t> direct_bytes_{0};
  std::atomic<std::uint64_t> flushes_{0};
  std::vector<std::atomic<std::uint64_t>> per_origin_envelopes_;

  mutable std::mutex trace_mutex_;
  std::vector<TraceRecord> trace_;
};

}  // namespace pgas

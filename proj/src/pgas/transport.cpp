#include "pgas/transport.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace pgas {

namespace {

// Yield rounds before a waiter blocks in the kernel. Waits on the message
// path are short and frequent, so a brief yield phase avoids most futex
// round trips without starving compute threads.
constexpr int kYieldRounds = 64;

std::uint64_t first_word(std::span<const std::byte> bytes) {
  std::uint64_t w = 0;
  if (bytes.size() >= sizeof(w)) std::memcpy(&w, bytes.data(), sizeof(w));
  return w;
}

}  // namespace

const char* to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::Put: return "PUT";
    case EnvelopeKind::GetRequest: return "GET_REQUEST";
    case EnvelopeKind::GetReply: return "GET_REPLY";
    case EnvelopeKind::Ack: return "ACK";
  }
  return "?";
}

Transport::Transport(const RuntimeConfig& config, SegmentRegistry& segments, const AbortSignal& abort)
    : topology_(config.topology()),
      routing_(config.routing),
      latency_(config.latency),
      realize_latency_(config.realize_latency),
      trace_enabled_(config.trace_messages),
      segments_(segments),
      abort_(abort),
      per_origin_envelopes_(config.num_units) {
  endpoints_.reserve(topology_.num_units);
  for (std::uint32_t u = 0; u < topology_.num_units; ++u) {
    auto ep = std::make_unique<Endpoint>();
    ep->last_sent.assign(topology_.num_units, 0);
    ep->completed.assign(topology_.num_units, 0);
    endpoints_.push_back(std::move(ep));
  }
  const auto nodes = topology_.num_nodes();
  services_.reserve(nodes);
  for (std::uint32_t n = 0; n < nodes; ++n) services_.push_back(std::make_unique<ServiceQueue>());
  for (auto& q : services_) {
    auto* raw = q.get();
    raw->worker = std::thread([this, raw] { serve_loop(*raw); });
  }
}

Transport::~Transport() {
  for (auto& q : services_) {
    {
      std::lock_guard lock(q->mutex);
      q->stop = true;
    }
    q->cv.notify_all();
  }
  for (auto& q : services_) {
    if (q->worker.joinable()) q->worker.join();
  }
}

void Transport::direct_put(UnitId origin, const GlobalPointer& dst, std::span<const std::byte> src) {
  if (!direct_eligible(origin, dst.unit)) {
    std::ostringstream os;
    os << "direct copy refused: " << origin << " -> " << dst.unit << " is not a same-node locality-aware transfer";
    throw Error(Errc::NotSameNode, os.str());
  }
  auto seg = segments_.get(dst.segment);
  auto region = seg->resolve(dst, src.size());
  if (!src.empty()) std::memmove(region.data(), src.data(), src.size());
  direct_copies_.fetch_add(1, std::memory_order_relaxed);
  direct_bytes_.fetch_add(src.size(), std::memory_order_relaxed);
}

void Transport::direct_get(UnitId origin, std::span<std::byte> dst, const GlobalPointer& src) {
  if (!direct_eligible(origin, src.unit)) {
    std::ostringstream os;
    os << "direct copy refused: " << src.unit << " -> " << origin << " is not a same-node locality-aware transfer";
    throw Error(Errc::NotSameNode, os.str());
  }
  auto seg = segments_.get(src.segment);
  auto region = seg->resolve(src, dst.size());
  if (!dst.empty()) std::memmove(dst.data(), region.data(), dst.size());
  direct_copies_.fetch_add(1, std::memory_order_relaxed);
  direct_bytes_.fetch_add(dst.size(), std::memory_order_relaxed);
}

void Transport::charge(const Envelope& env) {
  envelopes_.fetch_add(1, std::memory_order_relaxed);
  by_kind_[static_cast<std::size_t>(env.kind)].fetch_add(1, std::memory_order_relaxed);
  by_hop_[static_cast<std::size_t>(env.hop)].fetch_add(1, std::memory_order_relaxed);
  charged_seconds_.fetch_add(env.cost_seconds, std::memory_order_relaxed);
  per_origin_envelopes_[env.origin.index].fetch_add(1, std::memory_order_relaxed);
}

void Transport::pace_until(Clock::time_point t) const {
  if (!realize_latency_) return;
  while (Clock::now() < t) std::this_thread::yield();
}

std::uint64_t Transport::send(Envelope env, std::span<std::byte> get_dst) {
  abort_.throw_if_raised();
  if (env.kind != EnvelopeKind::Put && env.kind != EnvelopeKind::GetRequest) {
    throw Error(Errc::InvalidArgument, "only PUT and GET_REQUEST envelopes originate at a unit");
  }
  if (env.origin.index >= topology_.num_units || env.target.index >= topology_.num_units) {
    throw Error(Errc::InvalidTarget, "envelope addresses a unit outside the run");
  }
  if (env.kind == EnvelopeKind::Put) env.nbytes = env.payload.size();
  if (env.kind == EnvelopeKind::GetRequest) {
    env.payload.clear();
    if (get_dst.size() != env.nbytes) throw Error(Errc::InvalidArgument, "GET destination size mismatch");
  }

  auto& ep = *endpoints_[env.origin.index];
  env.seq = ++ep.last_sent[env.target.index];
  env.hop = classify(env.origin, env.target);
  env.cost_seconds = latency_.cost(env.hop, env.payload.size());
  env.ready_at = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(env.cost_seconds));
  ep.ops.emplace(op_key(env.target, env.seq), OpRecord{env.kind, get_dst, OpState::Pending, {}});
  charge(env);
  in_flight_.fetch_add(1, std::memory_order_acq_rel);

  const auto seq = env.seq;
  auto& q = *services_[topology_.node_of(env.target)];
  bool wake = false;
  {
    std::lock_guard lock(q.mutex);
    q.queue.push_back(std::move(env));
    wake = q.sleeping;
  }
  if (wake) q.cv.notify_one();
  return seq;
}

void Transport::serve_loop(ServiceQueue& q) {
  std::deque<Envelope> batch;
  for (;;) {
    {
      std::unique_lock lock(q.mutex);
      for (int i = 0; i < kYieldRounds && q.queue.empty() && !q.stop; ++i) {
        lock.unlock();
        std::this_thread::yield();
        lock.lock();
      }
      if (q.queue.empty() && !q.stop) {
        q.sleeping = true;
        q.cv.wait(lock, [&] { return !q.queue.empty() || q.stop; });
        q.sleeping = false;
      }
      if (q.queue.empty() && q.stop) return;
      batch.swap(q.queue);
    }
    for (auto& env : batch) {
      pace_until(env.ready_at);
      deliver_reply(serve(env));
    }
    batch.clear();
  }
}

Envelope Transport::serve(Envelope& request) {
  Envelope reply;
  reply.kind = request.kind == EnvelopeKind::Put ? EnvelopeKind::Ack : EnvelopeKind::GetReply;
  reply.origin = request.origin;
  reply.target = request.target;
  reply.segment = request.segment;
  reply.offset = request.offset;
  reply.nbytes = request.nbytes;
  reply.seq = request.seq;
  reply.hop = request.hop;

  try {
    auto seg = segments_.get(request.segment);
    const GlobalPointer at{request.segment, request.target, request.offset};
    auto region = seg->resolve(at, request.nbytes);
    if (request.kind == EnvelopeKind::Put) {
      if (!region.empty()) std::memcpy(region.data(), request.payload.data(), region.size());
    } else {
      reply.payload.assign(region.begin(), region.end());
    }
  } catch (const Error& e) {
    reply.error_code = e.code();
    reply.error = e.what();
    reply.payload.clear();
  }
  if (trace_enabled_) record_trace(request);

  reply.cost_seconds = latency_.cost(reply.hop, reply.payload.size());
  reply.ready_at = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(reply.cost_seconds));
  charge(reply);
  if (trace_enabled_) record_trace(reply);
  return reply;
}

void Transport::record_trace(const Envelope& env) {
  std::lock_guard lock(trace_mutex_);
  trace_.push_back(TraceRecord{env.kind, env.origin, env.target, env.seq, env.hop, env.payload.size(),
                               env.cost_seconds, first_word(env.payload)});
}

void Transport::deliver_reply(Envelope reply) {
  auto& ep = *endpoints_[reply.origin.index];
  {
    std::lock_guard lock(ep.inbox_mutex);
    ep.inbox.push_back(std::move(reply));
  }
  in_flight_.fetch_sub(1, std::memory_order_acq_rel);
  ep.arrivals.fetch_add(1, std::memory_order_release);
  ep.arrivals.notify_one();
}

void Transport::process_inbox(Endpoint& ep) {
  std::deque<Envelope> replies;
  {
    std::lock_guard lock(ep.inbox_mutex);
    replies.swap(ep.inbox);
  }
  for (auto& r : replies) {
    pace_until(r.ready_at);
    auto it = ep.ops.find(op_key(r.target, r.seq));
    if (it != ep.ops.end()) {
      auto& op = it->second;
      if (!r.error.empty()) {
        op.state = OpState::Failed;
        op.error = r.error;
      } else {
        if (r.kind == EnvelopeKind::GetReply && !r.payload.empty()) {
          std::memcpy(op.dst.data(), r.payload.data(), std::min(op.dst.size(), r.payload.size()));
        }
        op.state = OpState::Complete;
      }
    }
    auto& done = ep.completed[r.target.index];
    done = std::max(done, r.seq);
  }
}

void Transport::flush(UnitId origin, UnitId target) {
  if (origin.index >= topology_.num_units || target.index >= topology_.num_units) {
    throw Error(Errc::InvalidTarget, "flush addresses a unit outside the run");
  }
  flushes_.fetch_add(1, std::memory_order_relaxed);
  auto& ep = *endpoints_[origin.index];
  const auto want = ep.last_sent[target.index];
  int rounds = 0;
  while (ep.completed[target.index] < want) {
    const auto seen = ep.arrivals.load(std::memory_order_acquire);
    process_inbox(ep);
    if (ep.completed[target.index] >= want) break;
    abort_.throw_if_raised();
    if (rounds < kYieldRounds) {
      ++rounds;
      std::this_thread::yield();
    } else {
      ep.arrivals.wait(seen, std::memory_order_acquire);
    }
  }
}

bool Transport::has_op(UnitId origin, UnitId target, std::uint64_t seq) const {
  const auto& ep = *endpoints_[origin.index];
  return ep.ops.contains(op_key(target, seq));
}

OpState Transport::state(UnitId origin, UnitId target, std::uint64_t seq) const {
  const auto& ep = *endpoints_[origin.index];
  auto it = ep.ops.find(op_key(target, seq));
  if (it == ep.ops.end()) throw Error(Errc::InvalidHandle, "unknown or already consumed operation handle");
  return it->second.state;
}

std::pair<OpState, std::string> Transport::consume(UnitId origin, UnitId target, std::uint64_t seq) {
  auto& ep = *endpoints_[origin.index];
  auto it = ep.ops.find(op_key(target, seq));
  if (it == ep.ops.end()) throw Error(Errc::InvalidHandle, "unknown or already consumed operation handle");
  auto out = std::make_pair(it->second.state, std::move(it->second.error));
  ep.ops.erase(it);
  return out;
}

void Transport::drain() {
  while (in_flight_.load(std::memory_order_acquire) != 0) std::this_thread::yield();
}

TransportStats Transport::stats() const {
  TransportStats s;
  s.envelopes = envelopes_.load();
  for (std::size_t k = 0; k < kNumEnvelopeKinds; ++k) s.by_kind[k] = by_kind_[k].load();
  for (std::size_t h = 0; h < kNumHopClasses; ++h) s.by_hop[h] = by_hop_[h].load();
  s.charged_seconds = charged_seconds_.load();
  s.direct_copies = direct_copies_.load();
  s.direct_bytes = direct_bytes_.load();
  s.flushes = flushes_.load();
  return s;
}

std::uint64_t Transport::envelopes_for(UnitId origin) const {
  return per_origin_envelopes_.at(origin.index).load();
}

std::vector<TraceRecord> Transport::trace() const {
  std::lock_guard lock(trace_mutex_);
  return trace_;
}

void Transport::wake_all() {
  for (auto& ep : endpoints_) {
    ep->arrivals.fetch_add(1, std::memory_order_release);
    ep->arrivals.notify_all();
  }
}

}  // namespace pgas

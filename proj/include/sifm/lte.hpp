#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>

#include "sifm/event_queue.hpp"
#include "sifm/packet.hpp"
#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

// Cellular downlink: per-UE drop-tail RLC queues drained once per TTI by a
// deficit-credit scheduler that splits the TTI byte grant equally across
// backlogged UEs and redistributes what an emptying queue leaves behind.
// The grant is sized from the effective (post-overhead) rate, so a single
// saturated UE sees the full effective rate.
class LteDownlink {
 public:
  struct Config {
    std::uint64_t nominal_rate_bps = 100'000'000;
    std::uint64_t effective_rate_bps = 71'000'000;
    TimeUs tti_us = 1000;
    std::uint64_t rlc_limit_bytes = 100'000;
  };

  using DeliverFn = std::function<void(MnId, const PacketPtr&)>;

  LteDownlink(Simulator& sim, Config cfg) : sim_(sim), cfg_(cfg) {}

  void set_deliver(DeliverFn fn) { deliver_ = std::move(fn); }

  // Schedules the periodic TTI tick. Call once before running.
  void start();

  void attach(MnId mn);
  void detach(MnId mn);
  bool attached(MnId mn) const { return queues_.contains(mn); }

  // False = dropped (queue full or UE not attached).
  bool enqueue(MnId mn, const PacketPtr& pkt);

  std::uint64_t grant_bytes_per_tti() const {
    return cfg_.effective_rate_bps / 8 * cfg_.tti_us / 1'000'000;
  }
  std::uint64_t queue_bytes(MnId mn) const;
  const Config& config() const { return cfg_; }

  std::uint64_t rlc_drops = 0;
  std::uint64_t unattached_drops = 0;
  std::uint64_t detach_flush_drops = 0;
  std::uint64_t delivered_packets = 0;
  std::uint64_t delivered_bytes = 0;

 private:
  struct Queue {
    std::deque<PacketPtr> packets;
    std::uint64_t bytes = 0;
    std::uint64_t credit = 0;
  };

  void tick();

  Simulator& sim_;
  Config cfg_;
  DeliverFn deliver_;
  std::map<MnId, Queue> queues_;
  std::uint64_t carry_ = 0;
  bool started_ = false;
};

}  // namespace sifm

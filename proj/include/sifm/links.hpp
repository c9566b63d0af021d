#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "sifm/event_queue.hpp"
#include "sifm/time.hpp"

namespace sifm {

// Point-to-point serialized link: one transmission at a time at rate_bps,
// then prop_delay_us of flight. queue_limit_bytes bounds the backlog that
// has not yet finished serializing (0 = unbounded). The backlog is derived
// from the busy horizon instead of a real packet queue, which is exact for
// FIFO service.
class Pipe {
 public:
  Pipe(Simulator* sim, double rate_bps, TimeUs prop_delay_us,
       std::uint64_t queue_limit_bytes = 0)
      : sim_(sim),
        rate_bps_(rate_bps),
        prop_delay_us_(prop_delay_us),
        queue_limit_bytes_(queue_limit_bytes) {}

  // Returns false (and drops) if the backlog would exceed the limit.
  bool send(std::uint32_t bytes, EventQueue::Handler on_arrival) {
    const TimeUs now = sim_->now();
    const TimeUs start = busy_until_ > now ? busy_until_ : now;
    if (queue_limit_bytes_ > 0) {
      const std::uint64_t backlog =
          static_cast<std::uint64_t>((start - now) * rate_bps_ / 8e6);
      if (backlog + bytes > queue_limit_bytes_) return false;
    }
    const TimeUs tx = static_cast<TimeUs>(bytes * 8e6 / rate_bps_);
    busy_until_ = start + tx;
    sim_->at(busy_until_ + prop_delay_us_, std::move(on_arrival));
    return true;
  }

  TimeUs busy_until() const { return busy_until_; }

 private:
  Simulator* sim_;
  double rate_bps_;
  TimeUs prop_delay_us_;
  std::uint64_t queue_limit_bytes_;
  TimeUs busy_until_ = 0;
};

// Pure propagation delay, unlimited parallelism (control links).
class DelayLine {
 public:
  DelayLine(Simulator* sim, TimeUs delay_us) : sim_(sim), delay_us_(delay_us) {}

  void send(EventQueue::Handler on_arrival) {
    sim_->after(delay_us_, std::move(on_arrival));
  }

  TimeUs delay_us() const { return delay_us_; }

 private:
  Simulator* sim_;
  TimeUs delay_us_;
};

}  // namespace sifm

#include "sifm/traffic.hpp"

#include <cmath>

namespace sifm {

void TrafficSource::start(TimeUs at) {
  running_ = true;
  const std::uint64_t epoch = ++epoch_;
  start_at_ = at;
  cbr_index_ = 0;
  vbr_next_us_ = static_cast<double>(at);
  arm(at, epoch);
}

void TrafficSource::stop() {
  running_ = false;
  ++epoch_;
}

void TrafficSource::arm(TimeUs at, std::uint64_t epoch) {
  sim_.at(at, [this, epoch] {
    if (epoch != epoch_ || !running_) return;
    const TimeUs now = sim_.now();
    ++emissions;
    emit_(now);

    TimeUs next;
    if (cfg_.kind == TrafficKind::CBR) {
      ++cbr_index_;
      next = start_at_ +
             static_cast<TimeUs>(std::llround(static_cast<double>(cbr_index_) *
                                              cfg_.mean_interval_us));
    } else {
      vbr_next_us_ += exp_interval_us(rng_, cfg_.mean_interval_us);
      next = static_cast<TimeUs>(std::llround(vbr_next_us_));
    }
    if (next < now) next = now;
    arm(next, epoch);
  });
}

}  // namespace sifm

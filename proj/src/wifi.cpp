#include "sifm/wifi.hpp"

#include <algorithm>
#include <utility>

namespace sifm {

bool WifiMedium::transmit(std::uint64_t frame_bytes, bool downlink,
                          DoneFn on_done) {
  if (downlink && dl_backlog_ + frame_bytes > cfg_.dl_queue_limit_bytes) {
    ++dl_queue_drops;
    return false;
  }
  if (downlink) dl_backlog_ += frame_bytes;

  const TimeUs start = std::max(sim_.now(), busy_until_);
  const TimeUs done = start + airtime_us(frame_bytes);
  busy_until_ = done;

  ++frames_sent;
  payload_bytes_sent += frame_bytes;

  sim_.at(done, [this, frame_bytes, downlink, cb = std::move(on_done)] {
    if (downlink) dl_backlog_ -= frame_bytes;
    if (cb) cb();
  });
  return true;
}

}  // namespace sifm

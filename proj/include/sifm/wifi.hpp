#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "sifm/event_queue.hpp"
#include "sifm/packet.hpp"
#include "sifm/time.hpp"

namespace sifm {

// Shared 802.11-style medium: one frame in the air at a time, each frame
// paying a fixed overhead charge on top of PHY serialization. The overhead
// is derived from the target saturation goodput at the reference frame
// size, so the calibration constant is the goodput itself, not the
// overhead. Downlink (AP) frames share a byte-capped drop-tail buffer;
// uplink frames are window-bounded upstream and are not capped here.
class WifiMedium {
 public:
  struct Config {
    std::uint64_t phy_rate_bps = 54'000'000;
    std::uint64_t sat_goodput_bps = 22'000'000;
    std::uint32_t ref_frame_bytes = 1500;
    std::uint64_t dl_queue_limit_bytes = 1'000'000;
  };

  using DoneFn = std::function<void()>;

  WifiMedium(Simulator& sim, Config cfg) : sim_(sim), cfg_(cfg) {}

  double overhead_us() const {
    const double bits = 8.0 * cfg_.ref_frame_bytes;
    return bits * (1e6 / cfg_.sat_goodput_bps - 1e6 / cfg_.phy_rate_bps);
  }

  TimeUs airtime_us(std::uint64_t frame_bytes) const {
    const double tx = 8.0e6 * static_cast<double>(frame_bytes) /
                      static_cast<double>(cfg_.phy_rate_bps);
    return static_cast<TimeUs>(llround(overhead_us() + tx));
  }

  // False = dropped at the AP buffer (downlink only).
  bool transmit(std::uint64_t frame_bytes, bool downlink, DoneFn on_done);

  std::uint64_t dl_backlog_bytes() const { return dl_backlog_; }
  const Config& config() const { return cfg_; }

  std::uint64_t dl_queue_drops = 0;
  std::uint64_t frames_sent = 0;
  std::uint64_t payload_bytes_sent = 0;

 private:
  Simulator& sim_;
  Config cfg_;
  TimeUs busy_until_ = 0;
  std::uint64_t dl_backlog_ = 0;
};

}  // namespace sifm

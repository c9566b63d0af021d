#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "sifm/event_queue.hpp"
#include "sifm/time.hpp"

namespace sifm {

enum class TrafficKind : std::uint8_t { CBR, VBR };

// Uniform double in [0,1) from the top 53 bits of the generator, then the
// inverse exponential CDF. Kept out of <random> distributions so streams
// are reproducible across standard library implementations.
inline double exp_interval_us(std::mt19937_64& rng, double mean_us) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return -mean_us * std::log1p(-u);
}

// Emits at a fixed or exponentially distributed interval. CBR emission k
// lands at start + round(k * interval) so rounding never accumulates.
class TrafficSource {
 public:
  struct Config {
    TrafficKind kind = TrafficKind::VBR;
    double mean_interval_us = 8000.0;
    std::uint64_t seed = 1;
  };

  using EmitFn = std::function<void(TimeUs)>;

  TrafficSource(Simulator& sim, Config cfg, EmitFn emit)
      : sim_(sim), cfg_(cfg), emit_(std::move(emit)), rng_(cfg.seed) {}

  // First emission happens exactly at `at`.
  void start(TimeUs at);
  void stop();

  bool running() const { return running_; }
  std::uint64_t emissions = 0;

 private:
  void arm(TimeUs at, std::uint64_t epoch);

  Simulator& sim_;
  Config cfg_;
  EmitFn emit_;
  std::mt19937_64 rng_;
  bool running_ = false;
  std::uint64_t epoch_ = 0;
  TimeUs start_at_ = 0;
  std::uint64_t cbr_index_ = 0;
  double vbr_next_us_ = 0.0;
};

}  // namespace sifm

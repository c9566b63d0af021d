#pragma once

#include <cstdint>

namespace sifm {

// Simulation time in microseconds since scenario start.
using TimeUs = std::uint64_t;

constexpr TimeUs kUsPerMs = 1000;
constexpr TimeUs kUsPerSec = 1'000'000;

constexpr TimeUs ms(std::uint64_t v) { return v * kUsPerMs; }
constexpr TimeUs seconds(std::uint64_t v) { return v * kUsPerSec; }

constexpr double to_ms(TimeUs t) { return static_cast<double>(t) / 1000.0; }
constexpr double to_sec(TimeUs t) { return static_cast<double>(t) / 1e6; }

}  // namespace sifm

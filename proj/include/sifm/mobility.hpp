#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

enum class MobilityEventKind : std::uint8_t {
  ATTACH_LTE,
  DETACH_LTE,
  ATTACH_WIFI,
  DETACH_WIFI,
};

const char* to_string(MobilityEventKind e);

struct MobilityStep {
  TimeUs at = 0;
  MnId mn = 0;
  MobilityEventKind event = MobilityEventKind::ATTACH_LTE;
};

// Scripted attach/detach timeline for every UE in a scenario. Steps for
// one UE must be listed in strictly increasing time order and must form a
// consistent attach/detach sequence per interface starting from nothing
// attached. Dual attachment (ATTACH_WIFI while LTE is still up) is legal;
// that is the flow-mobility regime.
struct MobilityScript {
  std::vector<MobilityStep> steps;

  // Empty result means the script is well formed.
  std::vector<std::string> validate() const;
};

// A UE walking a straight line at `speed_mps` reaches coverage
// `distance_m` away after distance/speed seconds.
TimeUs linear_attach_time_us(double distance_m, double speed_mps);

}  // namespace sifm

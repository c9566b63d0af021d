#include "sifm/mobility.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace sifm {

const char* to_string(MobilityEventKind e) {
  switch (e) {
    case MobilityEventKind::ATTACH_LTE:
      return "ATTACH_LTE";
    case MobilityEventKind::DETACH_LTE:
      return "DETACH_LTE";
    case MobilityEventKind::ATTACH_WIFI:
      return "ATTACH_WIFI";
    case MobilityEventKind::DETACH_WIFI:
      return "DETACH_WIFI";
  }
  return "?";
}

std::vector<std::string> MobilityScript::validate() const {
  std::vector<std::string> errors;
  struct UeState {
    bool lte = false;
    bool wifi = false;
    TimeUs last_at = 0;
    bool seen = false;
  };
  std::map<MnId, UeState> state;

  for (std::size_t i = 0; i < steps.size(); ++i) {
    const MobilityStep& s = steps[i];
    UeState& u = state[s.mn];
    const std::string where = "step " + std::to_string(i) + " (mn " +
                              std::to_string(s.mn) + ", " +
                              to_string(s.event) + " at " +
                              std::to_string(s.at) + "us)";
    if (u.seen && s.at <= u.last_at) {
      errors.push_back(where + ": time not strictly increasing for this UE");
    }
    u.seen = true;
    u.last_at = s.at;

    bool* iface = (s.event == MobilityEventKind::ATTACH_LTE ||
                   s.event == MobilityEventKind::DETACH_LTE)
                      ? &u.lte
                      : &u.wifi;
    const bool attaching = s.event == MobilityEventKind::ATTACH_LTE ||
                           s.event == MobilityEventKind::ATTACH_WIFI;
    if (attaching) {
      if (*iface) {
        errors.push_back(where + ": already attached on this interface");
      }
      *iface = true;
    } else {
      if (!*iface) {
        errors.push_back(where + ": detach without a matching attach");
      }
      *iface = false;
    }
  }
  return errors;
}

TimeUs linear_attach_time_us(double distance_m, double speed_mps) {
  if (speed_mps <= 0.0) {
    throw std::invalid_argument("speed must be positive");
  }
  if (distance_m < 0.0) {
    throw std::invalid_argument("distance must be nonnegative");
  }
  return static_cast<TimeUs>(std::llround(distance_m / speed_mps * 1e6));
}

}  // namespace sifm

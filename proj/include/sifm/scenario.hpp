#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sifm/traffic.hpp"
#include "sifm/types.hpp"

namespace sifm {

enum class Architecture : std::uint8_t { SIFM, PMIPV6, NO_OFFLOAD };
enum class OffloadSelection : std::uint8_t { NONE, FULL, TCP_ONLY, UDP_ONLY };
enum class MobilityMode : std::uint8_t { MOVING, STATIC_DUAL };

const char* to_string(Architecture a);
const char* to_string(OffloadSelection p);
const char* to_string(MobilityMode m);
const char* to_string(TrafficKind k);

constexpr double kWifiEffectiveBps = 22e6;
constexpr double kPerUserLoadBps = 2e6;  // one 1 Mbps app per transport class

struct ScenarioConfig {
  std::string scenario_id;  // derived from the fields when left empty
  Architecture architecture = Architecture::SIFM;
  int num_users = 10;
  int offload_percent = 0;
  OffloadSelection policy = OffloadSelection::NONE;
  MobilityMode mobility_mode = MobilityMode::MOVING;
  // MOVING only: movers also drop the old access shortly after attaching
  // to the new one (and re-attach on the way back), instead of staying
  // dual-attached for the whole excursion.
  bool full_handover = false;
  std::uint64_t rlc_buffer_bytes = 102400;
  double duration_s = 20.0;
  std::uint64_t seed = 1;
  TrafficKind traffic = TrafficKind::VBR;
  std::uint32_t window_cap_segments = 64;
  std::uint64_t ra_config_delay_us = 15000;

  // Empty result means the config is runnable.
  std::vector<std::string> validate() const;
  std::string default_id() const;
};

// Strict parse: unknown keys are an error, values are type-checked.
ScenarioConfig scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioConfig& cfg);

struct GridConfig {
  std::vector<Architecture> architectures;
  std::vector<int> user_counts;
  std::vector<int> offload_percents;
  int repeats = 5;
  ScenarioConfig base;  // everything the grid axes do not set

  std::vector<ScenarioConfig> expand() const;
};

GridConfig grid_from_json_text(const std::string& text);

struct MoverSelection {
  std::vector<MnId> movers;  // lowest-numbered UEs, ids 1..k
  bool clamped = false;
};

// k = floor(offload% x WiFi effective rate / per-user load) users move,
// always the lowest-numbered ones so runs are comparable.
MoverSelection map_offload_to_movers(int offload_percent, int num_users,
                                     double per_user_load_bps =
                                         kPerUserLoadBps);

double offload_budget_bps(int offload_percent);

}  // namespace sifm

#include "sifm/scenario.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace sifm {

namespace {

using json = nlohmann::ordered_json;

Architecture architecture_from(const std::string& s) {
  if (s == "SIFM") return Architecture::SIFM;
  if (s == "PMIPV6") return Architecture::PMIPV6;
  if (s == "NO_OFFLOAD") return Architecture::NO_OFFLOAD;
  throw std::invalid_argument("unknown architecture: " + s);
}

OffloadSelection policy_from(const std::string& s) {
  if (s == "NONE") return OffloadSelection::NONE;
  if (s == "FULL") return OffloadSelection::FULL;
  if (s == "TCP_ONLY") return OffloadSelection::TCP_ONLY;
  if (s == "UDP_ONLY") return OffloadSelection::UDP_ONLY;
  throw std::invalid_argument("unknown policy: " + s);
}

MobilityMode mode_from(const std::string& s) {
  if (s == "MOVING") return MobilityMode::MOVING;
  if (s == "STATIC_DUAL") return MobilityMode::STATIC_DUAL;
  throw std::invalid_argument("unknown mobility_mode: " + s);
}

TrafficKind traffic_from(const std::string& s) {
  if (s == "CBR") return TrafficKind::CBR;
  if (s == "VBR" || s == "VBR_POISSON") return TrafficKind::VBR;
  throw std::invalid_argument("unknown traffic kind: " + s);
}

const std::set<std::string>& scenario_keys() {
  static const std::set<std::string> keys = {
      "scenario_id",     "architecture",    "num_users",
      "offload_percent", "policy",          "mobility_mode",
      "full_handover",   "rlc_buffer_bytes", "duration_s",
      "seed",            "traffic",         "window_cap_segments",
      "ra_config_delay_us"};
  return keys;
}

void apply_scenario_fields(const json& j, ScenarioConfig& cfg) {
  for (const auto& [key, value] : j.items()) {
    if (scenario_keys().count(key) == 0) {
      throw std::invalid_argument("unknown scenario key: " + key);
    }
    (void)value;
  }
  if (j.contains("scenario_id")) cfg.scenario_id = j.at("scenario_id");
  if (j.contains("architecture")) {
    cfg.architecture = architecture_from(j.at("architecture"));
  }
  if (j.contains("num_users")) cfg.num_users = j.at("num_users");
  if (j.contains("offload_percent")) {
    cfg.offload_percent = j.at("offload_percent");
  }
  if (j.contains("policy")) cfg.policy = policy_from(j.at("policy"));
  if (j.contains("mobility_mode")) {
    cfg.mobility_mode = mode_from(j.at("mobility_mode"));
  }
  if (j.contains("full_handover")) cfg.full_handover = j.at("full_handover");
  if (j.contains("rlc_buffer_bytes")) {
    cfg.rlc_buffer_bytes = j.at("rlc_buffer_bytes");
  }
  if (j.contains("duration_s")) cfg.duration_s = j.at("duration_s");
  if (j.contains("seed")) cfg.seed = j.at("seed");
  if (j.contains("traffic")) cfg.traffic = traffic_from(j.at("traffic"));
  if (j.contains("window_cap_segments")) {
    cfg.window_cap_segments = j.at("window_cap_segments");
  }
  if (j.contains("ra_config_delay_us")) {
    cfg.ra_config_delay_us = j.at("ra_config_delay_us");
  }
}

}  // namespace

const char* to_string(Architecture a) {
  switch (a) {
    case Architecture::SIFM:
      return "SIFM";
    case Architecture::PMIPV6:
      return "PMIPV6";
    case Architecture::NO_OFFLOAD:
      return "NO_OFFLOAD";
  }
  return "?";
}

const char* to_string(OffloadSelection p) {
  switch (p) {
    case OffloadSelection::NONE:
      return "NONE";
    case OffloadSelection::FULL:
      return "FULL";
    case OffloadSelection::TCP_ONLY:
      return "TCP_ONLY";
    case OffloadSelection::UDP_ONLY:
      return "UDP_ONLY";
  }
  return "?";
}

const char* to_string(MobilityMode m) {
  switch (m) {
    case MobilityMode::MOVING:
      return "MOVING";
    case MobilityMode::STATIC_DUAL:
      return "STATIC_DUAL";
  }
  return "?";
}

const char* to_string(TrafficKind k) {
  switch (k) {
    case TrafficKind::CBR:
      return "CBR";
    case TrafficKind::VBR:
      return "VBR";
  }
  return "?";
}

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> errors;
  if (num_users < 1 || num_users > 50) {
    errors.push_back("num_users must be in 1..50");
  }
  if (offload_percent < 0 || offload_percent > 100) {
    errors.push_back("offload_percent must be in 0..100");
  }
  if (duration_s <= 0.0) {
    errors.push_back("duration_s must be positive");
  }
  if (rlc_buffer_bytes < 2048) {
    errors.push_back("rlc_buffer_bytes must hold at least one frame (2048)");
  }
  if (window_cap_segments < 1) {
    errors.push_back("window_cap_segments must be at least 1");
  }
  if (policy != OffloadSelection::NONE &&
      architecture != Architecture::SIFM) {
    errors.push_back("offload policy applies to the SIFM architecture only");
  }
  if (mobility_mode == MobilityMode::STATIC_DUAL) {
    if (architecture == Architecture::NO_OFFLOAD) {
      errors.push_back("STATIC_DUAL needs an architecture that can offload");
    }
    if (architecture == Architecture::SIFM && offload_percent > 0 &&
        policy == OffloadSelection::NONE) {
      errors.push_back("STATIC_DUAL with SIFM and offload needs a policy");
    }
    if (full_handover) {
      errors.push_back("full_handover applies to MOVING scenarios only");
    }
  }
  if (architecture == Architecture::NO_OFFLOAD && offload_percent != 0) {
    errors.push_back("NO_OFFLOAD runs must use offload_percent 0");
  }
  return errors;
}

std::string ScenarioConfig::default_id() const {
  std::string id = to_string(architecture);
  id += "_u" + std::to_string(num_users);
  id += "_o" + std::to_string(offload_percent);
  id += "_";
  id += to_string(policy);
  id += "_";
  id += to_string(mobility_mode);
  if (full_handover) id += "_fh";
  if (traffic == TrafficKind::CBR) id += "_cbr";
  id += "_s" + std::to_string(seed);
  return id;
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("scenario JSON must be an object");
  }
  ScenarioConfig cfg;
  try {
    apply_scenario_fields(j, cfg);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario JSON: ") + e.what());
  }
  if (cfg.scenario_id.empty()) cfg.scenario_id = cfg.default_id();
  return cfg;
}

std::string scenario_to_json_text(const ScenarioConfig& cfg) {
  json j;
  j["scenario_id"] = cfg.scenario_id;
  j["architecture"] = to_string(cfg.architecture);
  j["num_users"] = cfg.num_users;
  j["offload_percent"] = cfg.offload_percent;
  j["policy"] = to_string(cfg.policy);
  j["mobility_mode"] = to_string(cfg.mobility_mode);
  j["full_handover"] = cfg.full_handover;
  j["rlc_buffer_bytes"] = cfg.rlc_buffer_bytes;
  j["duration_s"] = cfg.duration_s;
  j["seed"] = cfg.seed;
  j["traffic"] = to_string(cfg.traffic);
  j["window_cap_segments"] = cfg.window_cap_segments;
  j["ra_config_delay_us"] = cfg.ra_config_delay_us;
  return j.dump(2);
}

std::vector<ScenarioConfig> GridConfig::expand() const {
  std::vector<ScenarioConfig> out;
  for (Architecture arch : architectures) {
    for (int users : user_counts) {
      for (int offload : offload_percents) {
        if (arch == Architecture::NO_OFFLOAD && offload != 0) continue;
        for (int r = 0; r < repeats; ++r) {
          ScenarioConfig cfg = base;
          cfg.architecture = arch;
          cfg.num_users = users;
          cfg.offload_percent = offload;
          cfg.policy = (arch == Architecture::SIFM && offload > 0)
                           ? OffloadSelection::FULL
                           : OffloadSelection::NONE;
          cfg.seed = base.seed + static_cast<std::uint64_t>(r);
          cfg.scenario_id = cfg.default_id();
          out.push_back(cfg);
        }
      }
    }
  }
  return out;
}

GridConfig grid_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("grid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("grid JSON must be an object");
  }
  static const std::set<std::string> keys = {
      "architectures", "user_counts", "offload_percents", "repeats", "base"};
  for (const auto& [key, value] : j.items()) {
    if (keys.count(key) == 0) {
      throw std::invalid_argument("unknown grid key: " + key);
    }
    (void)value;
  }
  GridConfig grid;
  try {
    if (j.contains("architectures")) {
      for (const auto& a : j.at("architectures")) {
        grid.architectures.push_back(architecture_from(a));
      }
    }
    if (j.contains("user_counts")) {
      grid.user_counts = j.at("user_counts").get<std::vector<int>>();
    }
    if (j.contains("offload_percents")) {
      grid.offload_percents = j.at("offload_percents").get<std::vector<int>>();
    }
    if (j.contains("repeats")) grid.repeats = j.at("repeats");
    if (j.contains("base")) apply_scenario_fields(j.at("base"), grid.base);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("grid JSON: ") + e.what());
  }
  if (grid.architectures.empty()) {
    grid.architectures = {Architecture::SIFM, Architecture::PMIPV6};
  }
  if (grid.user_counts.empty()) {
    grid.user_counts = {10, 20, 30, 40, 50};
  }
  if (grid.offload_percents.empty()) {
    grid.offload_percents = {0, 25, 50, 75};
  }
  if (grid.repeats < 1) {
    throw std::invalid_argument("repeats must be at least 1");
  }
  return grid;
}

MoverSelection map_offload_to_movers(int offload_percent, int num_users,
                                     double per_user_load_bps) {
  if (per_user_load_bps <= 0.0) {
    throw std::invalid_argument("per-user load must be positive");
  }
  MoverSelection sel;
  int k = static_cast<int>(std::floor(static_cast<double>(offload_percent) /
                                      100.0 * kWifiEffectiveBps /
                                      per_user_load_bps));
  if (k > num_users) {
    k = num_users;
    sel.clamped = true;
  }
  for (int i = 1; i <= k; ++i) {
    sel.movers.push_back(static_cast<MnId>(i));
  }
  return sel;
}

double offload_budget_bps(int offload_percent) {
  return static_cast<double>(offload_percent) / 100.0 * kWifiEffectiveBps;
}

}  // namespace sifm

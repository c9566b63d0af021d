#pragma once

#include <compare>
#include <cstdint>
#include <optional>

#include "sifm/types.hpp"

namespace sifm {

// Per-field match with wildcard support. An unset optional matches anything.
// A fully wildcarded match is only legal on a priority-0 (table-miss) entry.
struct MatchFields {
  std::optional<Address> src_addr;
  std::optional<Address> dst_addr;
  std::optional<std::uint16_t> src_port;
  std::optional<std::uint16_t> dst_port;
  std::optional<Protocol> protocol;
  std::optional<PortId> ingress_port;

  bool fully_wildcarded() const {
    return !src_addr && !dst_addr && !src_port && !dst_port && !protocol &&
           !ingress_port;
  }

  bool matches(const FlowKey& key, PortId ingress) const {
    if (src_addr && *src_addr != key.src_addr) return false;
    if (dst_addr && *dst_addr != key.dst_addr) return false;
    if (src_port && *src_port != key.src_port) return false;
    if (dst_port && *dst_port != key.dst_port) return false;
    if (protocol && *protocol != key.protocol) return false;
    if (ingress_port && *ingress_port != ingress) return false;
    return true;
  }

  static MatchFields exact(const FlowKey& key) {
    MatchFields m;
    m.src_addr = key.src_addr;
    m.dst_addr = key.dst_addr;
    m.src_port = key.src_port;
    m.dst_port = key.dst_port;
    m.protocol = key.protocol;
    return m;
  }

  static MatchFields any() { return MatchFields{}; }

  friend bool operator==(const MatchFields&, const MatchFields&) = default;
};

enum class InstructionKind : std::uint8_t {
  FORWARD = 0,        // deliver on a local attachment port
  TUNNEL = 1,         // encapsulate toward a peer MA
  DECAP_FORWARD = 2,  // strip one encapsulation layer, deliver on a port
  DROP = 3,
  DEFAULT_ROUTE = 4,  // fall through to the MA's normal routing
};

constexpr std::uint8_t kMaxInstructionKind = 4;

// arg carries the FORWARD/DECAP_FORWARD port or the TUNNEL peer MaId;
// unused for DROP and DEFAULT_ROUTE (must be zero there).
struct Instruction {
  InstructionKind kind = InstructionKind::DEFAULT_ROUTE;
  std::uint64_t arg = 0;

  static Instruction forward(PortId port) {
    return {InstructionKind::FORWARD, port};
  }
  static Instruction tunnel(MaId peer) {
    return {InstructionKind::TUNNEL, peer};
  }
  static Instruction decap_forward(PortId port) {
    return {InstructionKind::DECAP_FORWARD, port};
  }
  static Instruction drop() { return {InstructionKind::DROP, 0}; }
  static Instruction default_route() {
    return {InstructionKind::DEFAULT_ROUTE, 0};
  }

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

}  // namespace sifm

#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace sifm {

// Stable mobile-node identifier (IMSI-like). Never reused within a scenario.
using MnId = std::uint64_t;

// Mobility-agent identifier (PGW, WAG, or a PMIPv6 MAG/LMA).
using MaId = std::uint64_t;

// IPv4-style address in host byte order. 0 means unassigned.
using Address = std::uint32_t;

// Attachment-port identifier, chosen by the owning MA. Opaque.
using PortId = std::uint32_t;

enum class Protocol : std::uint8_t {
  TCPLIKE = 0,
  UDPLIKE = 1,
};

enum class AttachStatus : std::uint8_t {
  DETACHED = 0x00,
  ATTACHED = 0x01,
};

// Five-tuple identifying one transport flow. The comparison order
// (src_addr, dst_addr, src_port, dst_port, protocol) is the canonical
// order used whenever flows are ranked, e.g. by offload policies.
struct FlowKey {
  Address src_addr = 0;
  Address dst_addr = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  Protocol protocol = Protocol::TCPLIKE;

  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

std::string to_string(Protocol p);
std::string format_address(Address a);
std::string to_string(const FlowKey& k);

}  // namespace sifm

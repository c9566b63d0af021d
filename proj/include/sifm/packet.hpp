#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

// One IP-in-IP encapsulation layer. Adds kEncapOverheadBytes on the wire.
struct EncapHeader {
  Address outer_src = 0;
  Address outer_dst = 0;
  MaId peer = 0;
};

constexpr std::uint32_t kEncapOverheadBytes = 20;

enum class Via : std::uint8_t { NONE = 0, LTE, WIFI };

struct Packet {
  std::uint64_t id = 0;  // unique within a scenario
  FlowKey key;
  MnId mn = 0;  // destination UE for downlink, source UE for uplink
  std::uint32_t payload_bytes = 0;
  std::uint64_t seq = 0;  // per-flow application sequence number

  TimeUs created_at = 0;
  TimeUs first_tx_at = 0;
  TimeUs delivered_at = 0;

  bool is_ack = false;
  std::uint64_t ack_seq = 0;  // cumulative: next expected sequence
  bool is_retransmission = false;

  std::vector<EncapHeader> encap;
  // Tunnel audit for the seamlessness checks.
  std::uint8_t encap_pushes = 0;
  std::uint8_t encap_pops = 0;
  Via delivered_via = Via::NONE;

  std::uint32_t wire_bytes() const {
    return payload_bytes +
           kEncapOverheadBytes * static_cast<std::uint32_t>(encap.size());
  }
};

using PacketPtr = std::shared_ptr<Packet>;

}  // namespace sifm

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sifm/flow_table.hpp"
#include "sifm/messages.hpp"
#include "sifm/packet.hpp"
#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

enum class MaRole : std::uint8_t { LTE, WIFI };

// Ingress port id for packets arriving over the inter-MA tunnel, so flow
// entries can constrain matches to tunneled traffic. UE ports start at 1.
constexpr PortId kTunnelIngressPort = 0xFFFFFFFF;
// Ingress port id for packets arriving from the operator/internet side.
constexpr PortId kUpstreamIngressPort = 0xFFFFFFFE;

struct AttachmentRecord {
  MnId mn_id = 0;
  PortId port_id = 0;
  Address mn_ip = 0;
  TimeUs attached_at = 0;
  // Previous address at the old anchor, learned from the BindingAck.
  std::optional<Address> old_mn_ip;
};

// Data-plane anchor (PGW for LTE, WAG for WiFi). Owns the address pool,
// attachment ports and an OpenFlow-style flow table. Control messages are
// returned to the caller for transport; the agent never touches the wire
// itself.
class MobilityAgent {
 public:
  struct Config {
    MaId id = 0;
    MaRole role = MaRole::LTE;
    Address ma_ip = 0;       // tunnel endpoint address
    Address pool_base = 0;   // first assignable UE address
    std::uint32_t pool_size = 4096;
  };

  explicit MobilityAgent(Config cfg) : cfg_(cfg) {}

  enum class AttachError { ALREADY_ATTACHED, POOL_EXHAUSTED };
  struct AttachResult {
    std::optional<AttachError> error;
    AttachmentRecord record;          // valid when no error
    std::optional<ControlMessage> binding_update;
  };

  // Allocates the next pool address (addresses are never reused within a
  // scenario) and a fresh port, and produces the BindingUpdate to send.
  AttachResult on_ue_attach(MnId mn, TimeUs now);

  enum class DetachError { NOT_ATTACHED };
  struct DetachResult {
    std::optional<DetachError> error;
    std::optional<ControlMessage> port_status;
  };

  // Quarantines the UE's address and produces the DETACHED PortStatusUpdate.
  DetachResult on_ue_detach(MnId mn, TimeUs now);

  enum class FlowModError { WRONG_MA };
  std::optional<FlowModError> apply_flow_mod(const FlowMod& mod, TimeUs now);

  // Remembers old_mn_ip delivered with an attach acknowledgment.
  void on_binding_ack(const BindingAck& ack);

  struct ForwardingDecision {
    enum class Kind : std::uint8_t {
      DELIVER_LOCAL,  // hand to the radio for mn on port
      SEND_TUNNEL,    // forward to peer MA, encapsulated
      DROP,
    };
    enum class DropReason : std::uint8_t {
      NONE,
      RULE_DROP,    // an entry said DROP
      NO_ROUTE,     // no rule and the destination is not attached here
      DECAP_EMPTY,  // DECAP_FORWARD on a packet with no encapsulation
      PORT_DOWN,    // rule points at a port that is no longer attached
    };
    Kind kind = Kind::DROP;
    DropReason reason = DropReason::NONE;
    MnId mn = 0;
    PortId port = 0;
    MaId tunnel_peer = 0;
  };

  // Matches the flow table and applies the winning instruction to pkt
  // (pushing or popping encapsulation as needed). DEFAULT_ROUTE and table
  // misses deliver to the attached owner of pkt's destination address.
  ForwardingDecision route_downlink(const PacketPtr& pkt, PortId ingress,
                                    TimeUs now);

  std::size_t expire_entries(TimeUs now) {
    return table_.expire_entries(now);
  }

  const Config& config() const { return cfg_; }
  FlowTable& flow_table() { return table_; }
  const FlowTable& flow_table() const { return table_; }

  bool attached(MnId mn) const { return attachments_.count(mn) > 0; }
  const AttachmentRecord* attachment(MnId mn) const;
  std::optional<MnId> owner_of(Address a) const;
  std::optional<MnId> port_owner(PortId p) const;

  std::uint64_t decap_errors = 0;
  std::uint64_t no_route_drops = 0;
  std::uint64_t rule_drops = 0;
  std::uint64_t port_down_drops = 0;
  std::vector<std::string> warnings;

 private:
  Config cfg_;
  FlowTable table_;
  std::map<MnId, AttachmentRecord> attachments_;
  std::map<Address, MnId> addr_owner_;
  std::map<PortId, MnId> port_owner_;
  std::vector<Address> quarantined_;
  std::uint32_t next_pool_index_ = 0;
  PortId next_port_ = 1;
  std::uint32_t next_xid_ = 1;
};

}  // namespace sifm

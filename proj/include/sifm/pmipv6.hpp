#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sifm/messages.hpp"
#include "sifm/packet.hpp"
#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

// Network-based mobility baseline: the anchor (LMA) allocates one stable
// home address per mobile node and tunnels downlink traffic to whichever
// access gateway (MAG) last registered it. MAGs register with proxy binding
// updates and hold early downlink packets until the node's address
// configuration on the new link completes.

struct LmaBinding {
  MnId mn_id = 0;
  Address home_address = 0;
  MaId mag_id = 0;         // 0 = not currently registered anywhere
  std::uint32_t lifetime_s = 0;
  TimeUs updated_at = 0;
};

class Lma {
 public:
  struct Config {
    MaId id = 0;
    Address lma_ip = 0;
    Address pool_base = 0;
    std::uint32_t pool_size = 4096;
  };

  explicit Lma(Config cfg) : cfg_(cfg) {}

  struct PbuOutcome {
    ControlMessage pba;
    bool mag_changed = false;
  };

  PbuOutcome handle_pbu(const ControlMessage& msg, TimeUs now);

  const LmaBinding* lookup_home(Address home_address) const;
  const LmaBinding* lookup_mn(MnId mn) const;
  const Config& config() const { return cfg_; }

  std::vector<std::string> warnings;

 private:
  Config cfg_;
  std::map<MnId, LmaBinding> bindings_;
  std::map<Address, MnId> by_address_;
  std::uint32_t next_offset_ = 0;
};

enum class MagPhase : std::uint8_t {
  IDLE,
  PENDING_PBA,   // PBU sent, waiting for the anchor
  CONFIGURING,   // PBA received, node's address configuration in flight
  UP,
};

class Mag {
 public:
  struct Config {
    MaId id = 0;
    Address mag_ip = 0;
    MaId lma_id = 0;
    std::size_t pending_limit = 64;
  };

  explicit Mag(Config cfg) : cfg_(cfg) {}

  // UE appeared on an access port. Emits the registration PBU; downlink for
  // this node buffers until configuration completes.
  ControlMessage on_ue_attach(MnId mn, PortId port, TimeUs now);

  // UE left. Emits a zero-lifetime PBU (deregistration).
  ControlMessage on_ue_detach(MnId mn, TimeUs now);

  struct PbaResult {
    MnId mn = 0;
    Address home_address = 0;
    bool accepted = false;
  };
  PbaResult on_pba(const ControlMessage& msg, TimeUs now);

  // Router advertisement / address configuration done; returns the packets
  // held back while the node was coming up, in arrival order.
  std::vector<PacketPtr> on_configuration_complete(MnId mn, TimeUs now);

  // Downlink packet for a node behind this MAG. Returns true when the
  // packet may be delivered now; false means it was buffered or dropped
  // (dropped when the node is unknown or the buffer is full).
  bool accept_downlink(const PacketPtr& pkt, MnId mn, TimeUs now);

  MagPhase phase(MnId mn) const;
  std::optional<PortId> port_of(MnId mn) const;
  std::optional<Address> home_of(MnId mn) const;
  const Config& config() const { return cfg_; }

  std::uint64_t buffer_drops = 0;
  std::uint64_t unknown_drops = 0;
  std::vector<std::string> warnings;

 private:
  struct NodeState {
    MnId mn = 0;
    PortId port = 0;
    MagPhase phase = MagPhase::IDLE;
    Address home_address = 0;
    std::deque<PacketPtr> pending;
  };

  Config cfg_;
  std::map<MnId, NodeState> nodes_;
  std::uint32_t next_xid_ = 1;
};

}  // namespace sifm

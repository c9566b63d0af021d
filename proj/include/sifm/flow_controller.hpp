#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sifm/messages.hpp"
#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

struct BindingCacheEntry {
  MnId mn_id = 0;
  MaId ma_id = 0;
  Address mn_ip = 0;
  Address ma_ip = 0;
  PortId port_id = 0;
  AttachStatus status = AttachStatus::DETACHED;
  TimeUs updated_at = 0;
};

enum class PolicyKind : std::uint8_t {
  NO_OFFLOAD,
  FULL_ON_WIFI_ATTACH,
  SELECTIVE,
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::NO_OFFLOAD;
  // SELECTIVE only: which transport classes may move, under which budget.
  std::set<Protocol> protocols;
  std::uint64_t budget_bps = 0;
};

enum class Placement : std::uint8_t { VIA_LTE, VIA_WIFI };

struct FlowInfo {
  FlowKey key;
  MnId mn = 0;
  std::uint64_t offered_bps = 0;  // configured offered load, not measured
};

// Centralized controller: binding cache, flow directory and offload policy.
// All decisions are emitted as FlowMods addressed to their target MA; the
// caller owns transport. Rule changes are diffed against the last emitted
// placement, so repeating a signal is idempotent.
class FlowController {
 public:
  FlowController(MaId lte_ma, MaId wifi_ma, PolicyConfig policy)
      : lte_ma_(lte_ma), wifi_ma_(wifi_ma), policy_(policy) {}

  struct BindingUpdateOutcome {
    ControlMessage ack;            // BindingAck, xid echoed
    std::vector<FlowMod> flow_mods;
  };

  BindingUpdateOutcome handle_binding_update(const ControlMessage& msg,
                                             TimeUs now);

  // DETACHED with a surviving attachment moves every flow of the UE onto
  // the tunnel toward the surviving MA. Unknown (mn, ma) pairs are a no-op
  // with a warning.
  std::vector<FlowMod> handle_port_status(const ControlMessage& msg,
                                          TimeUs now);

  // Harness-side flow registration (first sight of a flow at its anchor).
  std::vector<FlowMod> note_flow(const FlowInfo& info, TimeUs now);

  std::vector<BindingCacheEntry> lookup_bindings(MnId mn) const;

  // Pure policy function. Consumes the SELECTIVE budget in canonical
  // FlowKey order regardless of the input order; returns placements
  // aligned with the input.
  static std::vector<Placement> compute_flow_assignment(
      const PolicyConfig& policy, const std::vector<FlowInfo>& flows,
      bool dual_attached);

  const PolicyConfig& policy() const { return policy_; }
  const std::map<std::pair<MnId, MaId>, BindingCacheEntry>& binding_cache()
      const {
    return cache_;
  }

  std::vector<std::string> warnings;

 private:
  // What the anchor (and, for tunneled flows, the egress MA) should be told
  // for one flow. The anchor instruction is DEFAULT_ROUTE when the flow's
  // destination is the UE's own current address, FORWARD(port) when the UE
  // re-attached under a fresh address and the old one must still reach it.
  struct DesiredRule {
    Placement placement = Placement::VIA_LTE;
    Instruction anchor;
    std::optional<Instruction> egress;
  };

  bool attached_at(MnId mn, MaId ma) const;
  const BindingCacheEntry* entry(MnId mn, MaId ma) const;
  std::vector<FlowMod> recompute_rules(TimeUs now);
  void desired_rules(std::map<FlowKey, DesiredRule>& out);

  MaId lte_ma_;
  MaId wifi_ma_;
  PolicyConfig policy_;
  std::map<std::pair<MnId, MaId>, BindingCacheEntry> cache_;
  std::map<MnId, std::vector<FlowInfo>> directory_;
  // Last instructions emitted per flow. Absent anchor entry = implicit
  // default routing with no rule installed.
  struct EmittedState {
    std::optional<Instruction> anchor;
    std::optional<Instruction> egress;
  };
  std::map<FlowKey, EmittedState> emitted_;
};

}  // namespace sifm

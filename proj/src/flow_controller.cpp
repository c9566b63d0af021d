#include "sifm/flow_controller.hpp"

#include <algorithm>
#include <cassert>

#include "sifm/mobility_agent.hpp"

namespace sifm {

bool FlowController::attached_at(MnId mn, MaId ma) const {
  const auto* e = entry(mn, ma);
  return e != nullptr && e->status == AttachStatus::ATTACHED;
}

const BindingCacheEntry* FlowController::entry(MnId mn, MaId ma) const {
  auto it = cache_.find({mn, ma});
  return it == cache_.end() ? nullptr : &it->second;
}

std::vector<BindingCacheEntry> FlowController::lookup_bindings(MnId mn) const {
  std::vector<BindingCacheEntry> out;
  for (auto it = cache_.lower_bound({mn, 0});
       it != cache_.end() && it->first.first == mn; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::vector<Placement> FlowController::compute_flow_assignment(
    const PolicyConfig& policy, const std::vector<FlowInfo>& flows,
    bool dual_attached) {
  std::vector<Placement> out(flows.size(), Placement::VIA_LTE);
  if (!dual_attached || policy.kind == PolicyKind::NO_OFFLOAD) return out;

  if (policy.kind == PolicyKind::FULL_ON_WIFI_ATTACH) {
    std::fill(out.begin(), out.end(), Placement::VIA_WIFI);
    return out;
  }

  // SELECTIVE: walk flows in canonical key order, moving each eligible flow
  // while its offered rate still fits the remaining budget. The budget is
  // consumed greedily, so the moved set is the longest feasible prefix of
  // the eligible flows.
  std::vector<std::size_t> order(flows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return flows[a].key < flows[b].key;
  });
  std::uint64_t remaining = policy.budget_bps;
  for (std::size_t i : order) {
    if (!policy.protocols.contains(flows[i].key.protocol)) continue;
    if (flows[i].offered_bps > remaining) break;
    remaining -= flows[i].offered_bps;
    out[i] = Placement::VIA_WIFI;
  }
  return out;
}

void FlowController::desired_rules(std::map<FlowKey, DesiredRule>& out) {
  std::vector<FlowInfo> pooled;
  std::map<FlowKey, Placement> placement;
  for (const auto& [mn, flows] : directory_) {
    const bool lte = attached_at(mn, lte_ma_);
    const bool wifi = attached_at(mn, wifi_ma_);
    // A fresh LTE binding on a dual-attached UE means it is leaving WiFi
    // coverage: flows go home before the WiFi link actually drops, so the
    // later detach loses nothing.
    const bool offloadable =
        lte && wifi &&
        entry(mn, wifi_ma_)->updated_at >= entry(mn, lte_ma_)->updated_at;
    if (offloadable) {
      pooled.insert(pooled.end(), flows.begin(), flows.end());
    } else {
      const Placement p = (wifi && !lte) ? Placement::VIA_WIFI
                                         : Placement::VIA_LTE;
      for (const auto& f : flows) placement[f.key] = p;
    }
  }
  const auto placed = compute_flow_assignment(policy_, pooled, true);
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    placement[pooled[i].key] = placed[i];
  }

  for (const auto& [mn, flows] : directory_) {
    const auto* lte_entry = entry(mn, lte_ma_);
    const auto* wifi_entry = entry(mn, wifi_ma_);
    const bool lte_up =
        lte_entry != nullptr && lte_entry->status == AttachStatus::ATTACHED;
    const bool wifi_up =
        wifi_entry != nullptr && wifi_entry->status == AttachStatus::ATTACHED;
    for (const auto& f : flows) {
      DesiredRule r;
      r.placement = placement.at(f.key);
      if (r.placement == Placement::VIA_WIFI) {
        if (!wifi_up) {
          warnings.push_back("flow placed VIA_WIFI without a wifi binding");
          r.placement = Placement::VIA_LTE;
        } else {
          r.anchor = Instruction::tunnel(wifi_ma_);
          r.egress = Instruction::decap_forward(wifi_entry->port_id);
        }
      }
      if (r.placement == Placement::VIA_LTE) {
        if (lte_up && f.key.dst_addr != lte_entry->mn_ip) {
          r.anchor = Instruction::forward(lte_entry->port_id);
        } else {
          r.anchor = Instruction::default_route();
        }
      }
      out[f.key] = r;
    }
  }
}

std::vector<FlowMod> FlowController::recompute_rules(TimeUs) {
  std::map<FlowKey, DesiredRule> desired;
  desired_rules(desired);

  std::vector<FlowMod> mods;
  for (const auto& [key, want] : desired) {
    EmittedState& have = emitted_[key];

    const bool anchor_is_implicit_default =
        !have.anchor.has_value() &&
        want.anchor.kind == InstructionKind::DEFAULT_ROUTE;
    if (!anchor_is_implicit_default &&
        (!have.anchor.has_value() || !(*have.anchor == want.anchor))) {
      FlowMod fm;
      fm.ma_id = lte_ma_;
      fm.match = MatchFields::exact(key);
      fm.priority = 10;
      fm.instruction = want.anchor;
      mods.push_back(fm);
      have.anchor = want.anchor;
    }

    // The egress-side decap rule is only ever added or retargeted; when a
    // flow returns to the anchor path the stale decap rule matches nothing.
    if (want.egress.has_value() &&
        (!have.egress.has_value() || !(*have.egress == *want.egress))) {
      FlowMod fm;
      fm.ma_id = wifi_ma_;
      fm.match = MatchFields::exact(key);
      fm.match.ingress_port = kTunnelIngressPort;
      fm.priority = 10;
      fm.instruction = *want.egress;
      mods.push_back(fm);
      have.egress = want.egress;
    }
  }
  return mods;
}

FlowController::BindingUpdateOutcome FlowController::handle_binding_update(
    const ControlMessage& msg, TimeUs now) {
  const auto& bu = std::get<BindingUpdate>(msg.body);

  BindingUpdateOutcome out;
  BindingAck ack;
  ack.mn_id = bu.mn_id;
  ack.ma_id = bu.ma_id;

  if (bu.ma_id != lte_ma_ && bu.ma_id != wifi_ma_) {
    warnings.push_back("binding update from unknown agent " +
                       std::to_string(bu.ma_id));
    ack.result = Result::ERROR;
    out.ack = ControlMessage{msg.xid, ack};
    return out;
  }

  const MaId other = (bu.ma_id == lte_ma_) ? wifi_ma_ : lte_ma_;
  if (bu.status == AttachStatus::ATTACHED) {
    if (const auto* prev = entry(bu.mn_id, other);
        prev != nullptr && prev->status == AttachStatus::ATTACHED) {
      ack.old_mn_ip = prev->mn_ip;
    }
  }

  BindingCacheEntry e;
  e.mn_id = bu.mn_id;
  e.ma_id = bu.ma_id;
  e.mn_ip = bu.mn_ip;
  e.ma_ip = bu.ma_ip;
  e.port_id = bu.port_id;
  e.status = bu.status;
  e.updated_at = now;
  cache_[{bu.mn_id, bu.ma_id}] = e;

  ack.result = Result::OK;
  out.ack = ControlMessage{msg.xid, ack};
  out.flow_mods = recompute_rules(now);
  return out;
}

std::vector<FlowMod> FlowController::handle_port_status(
    const ControlMessage& msg, TimeUs now) {
  const auto& psu = std::get<PortStatusUpdate>(msg.body);
  auto it = cache_.find({psu.mn_id, psu.ma_id});
  if (it == cache_.end()) {
    warnings.push_back("port status for unknown binding mn=" +
                       std::to_string(psu.mn_id));
    return {};
  }
  it->second.status = psu.status;
  it->second.port_id = psu.port_id;
  it->second.updated_at = now;
  return recompute_rules(now);
}

std::vector<FlowMod> FlowController::note_flow(const FlowInfo& info,
                                               TimeUs now) {
  auto& flows = directory_[info.mn];
  const auto pos = std::lower_bound(
      flows.begin(), flows.end(), info,
      [](const FlowInfo& a, const FlowInfo& b) { return a.key < b.key; });
  if (pos != flows.end() && pos->key == info.key) return {};
  flows.insert(pos, info);
  return recompute_rules(now);
}

}  // namespace sifm

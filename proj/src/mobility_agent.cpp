#include "sifm/mobility_agent.hpp"

namespace sifm {

MobilityAgent::AttachResult MobilityAgent::on_ue_attach(MnId mn, TimeUs now) {
  AttachResult res;
  if (attachments_.count(mn)) {
    res.error = AttachError::ALREADY_ATTACHED;
    return res;
  }
  if (next_pool_index_ >= cfg_.pool_size) {
    res.error = AttachError::POOL_EXHAUSTED;
    return res;
  }
  AttachmentRecord rec;
  rec.mn_id = mn;
  rec.mn_ip = cfg_.pool_base + next_pool_index_++;
  rec.port_id = next_port_++;
  rec.attached_at = now;
  attachments_[mn] = rec;
  addr_owner_[rec.mn_ip] = mn;
  port_owner_[rec.port_id] = mn;

  BindingUpdate bu;
  bu.mn_id = mn;
  bu.ma_id = cfg_.id;
  bu.mn_ip = rec.mn_ip;
  bu.ma_ip = cfg_.ma_ip;
  bu.port_id = rec.port_id;
  bu.status = AttachStatus::ATTACHED;
  res.record = rec;
  res.binding_update = ControlMessage{next_xid_++, bu};
  return res;
}

MobilityAgent::DetachResult MobilityAgent::on_ue_detach(MnId mn, TimeUs now) {
  DetachResult res;
  auto it = attachments_.find(mn);
  if (it == attachments_.end()) {
    res.error = DetachError::NOT_ATTACHED;
    return res;
  }
  const AttachmentRecord rec = it->second;
  // The address is quarantined, never returned to the pool.
  quarantined_.push_back(rec.mn_ip);
  addr_owner_.erase(rec.mn_ip);
  port_owner_.erase(rec.port_id);
  attachments_.erase(it);

  PortStatusUpdate ps;
  ps.mn_id = mn;
  ps.ma_id = cfg_.id;
  ps.port_id = rec.port_id;
  ps.status = AttachStatus::DETACHED;
  res.port_status = ControlMessage{next_xid_++, ps};
  (void)now;
  return res;
}

std::optional<MobilityAgent::FlowModError> MobilityAgent::apply_flow_mod(
    const FlowMod& mod, TimeUs now) {
  if (mod.ma_id != cfg_.id) {
    warnings.push_back("flow mod addressed to ma " +
                       std::to_string(mod.ma_id) + " dropped");
    return FlowModError::WRONG_MA;
  }
  table_.apply(mod, now);
  return std::nullopt;
}

void MobilityAgent::on_binding_ack(const BindingAck& ack) {
  auto it = attachments_.find(ack.mn_id);
  if (it == attachments_.end()) return;
  if (ack.old_mn_ip) it->second.old_mn_ip = ack.old_mn_ip;
}

const AttachmentRecord* MobilityAgent::attachment(MnId mn) const {
  auto it = attachments_.find(mn);
  return it == attachments_.end() ? nullptr : &it->second;
}

std::optional<MnId> MobilityAgent::owner_of(Address a) const {
  auto it = addr_owner_.find(a);
  if (it == addr_owner_.end()) return std::nullopt;
  return it->second;
}

std::optional<MnId> MobilityAgent::port_owner(PortId p) const {
  auto it = port_owner_.find(p);
  if (it == port_owner_.end()) return std::nullopt;
  return it->second;
}

MobilityAgent::ForwardingDecision MobilityAgent::route_downlink(
    const PacketPtr& pkt, PortId ingress, TimeUs now) {
  using FD = ForwardingDecision;
  FD out;
  const auto m = table_.match_packet(pkt->key, ingress, pkt->wire_bytes(), now);

  const auto deliver_on_port = [&](PortId port) {
    auto owner = port_owner(port);
    if (!owner) {
      out.kind = FD::Kind::DROP;
      out.reason = FD::DropReason::PORT_DOWN;
      port_down_drops++;
      return;
    }
    out.kind = FD::Kind::DELIVER_LOCAL;
    out.mn = *owner;
    out.port = port;
  };

  switch (m.instruction.kind) {
    case InstructionKind::FORWARD:
      deliver_on_port(static_cast<PortId>(m.instruction.arg));
      return out;
    case InstructionKind::TUNNEL: {
      EncapHeader h;
      h.outer_src = cfg_.ma_ip;
      h.peer = static_cast<MaId>(m.instruction.arg);
      pkt->encap.push_back(h);
      pkt->encap_pushes++;
      out.kind = FD::Kind::SEND_TUNNEL;
      out.tunnel_peer = h.peer;
      return out;
    }
    case InstructionKind::DECAP_FORWARD: {
      if (pkt->encap.empty()) {
        decap_errors++;
        out.kind = FD::Kind::DROP;
        out.reason = FD::DropReason::DECAP_EMPTY;
        return out;
      }
      pkt->encap.pop_back();
      pkt->encap_pops++;
      deliver_on_port(static_cast<PortId>(m.instruction.arg));
      return out;
    }
    case InstructionKind::DROP:
      rule_drops++;
      out.kind = FD::Kind::DROP;
      out.reason = FD::DropReason::RULE_DROP;
      return out;
    case InstructionKind::DEFAULT_ROUTE:
      break;  // fall through to destination-address routing
  }

  auto owner = owner_of(pkt->key.dst_addr);
  if (!owner) {
    no_route_drops++;
    out.kind = FD::Kind::DROP;
    out.reason = FD::DropReason::NO_ROUTE;
    return out;
  }
  out.kind = FD::Kind::DELIVER_LOCAL;
  out.mn = *owner;
  out.port = attachments_.at(*owner).port_id;
  return out;
}

}  // namespace sifm

#include "sifm/pmipv6.hpp"

namespace sifm {

Lma::PbuOutcome Lma::handle_pbu(const ControlMessage& msg, TimeUs now) {
  const auto& pbu = std::get<ProxyBindingUpdate>(msg.body);

  ProxyBindingAck pba;
  pba.mn_id = pbu.mn_id;
  pba.mag_id = pbu.mag_id;

  PbuOutcome out;

  auto it = bindings_.find(pbu.mn_id);
  if (it == bindings_.end()) {
    if (next_offset_ >= cfg_.pool_size) {
      warnings.push_back("home address pool exhausted");
      pba.result = Result::ERROR;
      out.pba = ControlMessage{msg.xid, pba};
      return out;
    }
    LmaBinding b;
    b.mn_id = pbu.mn_id;
    b.home_address = cfg_.pool_base + next_offset_++;
    by_address_[b.home_address] = b.mn_id;
    it = bindings_.emplace(pbu.mn_id, b).first;
  }

  LmaBinding& b = it->second;
  if (pbu.lifetime_s == 0) {
    // Deregistration only takes effect from the MAG that holds the binding;
    // a stale one from the previous gateway must not tear down the new path.
    if (b.mag_id == pbu.mag_id) b.mag_id = 0;
  } else {
    out.mag_changed = (b.mag_id != pbu.mag_id);
    b.mag_id = pbu.mag_id;
  }
  b.lifetime_s = pbu.lifetime_s;
  b.updated_at = now;

  pba.home_prefix = b.home_address;
  pba.result = Result::OK;
  out.pba = ControlMessage{msg.xid, pba};
  return out;
}

const LmaBinding* Lma::lookup_home(Address home_address) const {
  auto it = by_address_.find(home_address);
  if (it == by_address_.end()) return nullptr;
  return &bindings_.at(it->second);
}

const LmaBinding* Lma::lookup_mn(MnId mn) const {
  auto it = bindings_.find(mn);
  return it == bindings_.end() ? nullptr : &it->second;
}

ControlMessage Mag::on_ue_attach(MnId mn, PortId port, TimeUs) {
  NodeState& st = nodes_[mn];
  st.mn = mn;
  st.port = port;
  st.phase = MagPhase::PENDING_PBA;

  ProxyBindingUpdate pbu;
  pbu.mn_id = mn;
  pbu.mag_id = cfg_.id;
  pbu.lifetime_s = 3600;
  return ControlMessage{next_xid_++, pbu};
}

ControlMessage Mag::on_ue_detach(MnId mn, TimeUs) {
  auto it = nodes_.find(mn);
  if (it != nodes_.end()) nodes_.erase(it);

  ProxyBindingUpdate pbu;
  pbu.mn_id = mn;
  pbu.mag_id = cfg_.id;
  pbu.lifetime_s = 0;
  return ControlMessage{next_xid_++, pbu};
}

Mag::PbaResult Mag::on_pba(const ControlMessage& msg, TimeUs) {
  const auto& pba = std::get<ProxyBindingAck>(msg.body);
  PbaResult res;
  res.mn = pba.mn_id;

  auto it = nodes_.find(pba.mn_id);
  if (it == nodes_.end()) {
    // PBA for a node that already left (e.g. detach raced the reply).
    return res;
  }
  if (pba.result != Result::OK) {
    warnings.push_back("registration rejected for mn " +
                       std::to_string(pba.mn_id));
    nodes_.erase(it);
    return res;
  }
  NodeState& st = it->second;
  if (st.phase == MagPhase::PENDING_PBA) st.phase = MagPhase::CONFIGURING;
  st.home_address = pba.home_prefix;
  res.home_address = pba.home_prefix;
  res.accepted = true;
  return res;
}

std::vector<PacketPtr> Mag::on_configuration_complete(MnId mn, TimeUs) {
  std::vector<PacketPtr> out;
  auto it = nodes_.find(mn);
  if (it == nodes_.end()) return out;
  NodeState& st = it->second;
  if (st.phase != MagPhase::CONFIGURING) return out;
  st.phase = MagPhase::UP;
  out.assign(st.pending.begin(), st.pending.end());
  st.pending.clear();
  return out;
}

bool Mag::accept_downlink(const PacketPtr& pkt, MnId mn, TimeUs) {
  auto it = nodes_.find(mn);
  if (it == nodes_.end()) {
    ++unknown_drops;
    return false;
  }
  NodeState& st = it->second;
  if (st.phase == MagPhase::UP) return true;
  if (st.pending.size() >= cfg_.pending_limit) {
    ++buffer_drops;
    return false;
  }
  st.pending.push_back(pkt);
  return false;
}

MagPhase Mag::phase(MnId mn) const {
  auto it = nodes_.find(mn);
  return it == nodes_.end() ? MagPhase::IDLE : it->second.phase;
}

std::optional<PortId> Mag::port_of(MnId mn) const {
  auto it = nodes_.find(mn);
  if (it == nodes_.end()) return std::nullopt;
  return it->second.port;
}

std::optional<Address> Mag::home_of(MnId mn) const {
  auto it = nodes_.find(mn);
  if (it == nodes_.end() || it->second.home_address == 0) return std::nullopt;
  return it->second.home_address;
}

}  // namespace sifm

#include "sifm/world.hpp"

#include <algorithm>
#include <cmath>

namespace sifm {

namespace {

constexpr TimeUs kTrafficStartUs = 200'000;
constexpr TimeUs kFlowStaggerUs = 137;
constexpr TimeUs kDualAttachAtUs = 500'000;
constexpr TimeUs kDualStaggerUs = 10'000;
constexpr TimeUs kOffloadAtUs = 1'000'000;
constexpr TimeUs kMoveStaggerUs = 20'000;
constexpr TimeUs kFullHandoverGapUs = 200'000;
constexpr TimeUs kPmipBreakGapUs = 1'000;
constexpr double kReturnFraction = 0.74;
constexpr std::uint64_t kAppRateBps = 1'000'000;
constexpr std::uint32_t kAppPayloadBytes = 1000;
constexpr std::uint32_t kAckBytes = 40;
constexpr std::uint16_t kRemotePort = 80;
constexpr std::uint16_t kTcpAppPort = 5001;
constexpr std::uint16_t kUdpAppPort = 5002;
constexpr TimeUs kControlHopUs = 1000;

Address prefix16(Address a) { return a & 0xFFFF0000u; }

}  // namespace

World::World(ScenarioConfig cfg)
    : cfg_(std::move(cfg)),
      duration_us_(static_cast<TimeUs>(std::llround(cfg_.duration_s * 1e6))),
      metrics_(std::min<TimeUs>(kWarmupUs, duration_us_), duration_us_) {
  if (cfg_.scenario_id.empty()) cfg_.scenario_id = cfg_.default_id();
}

World::~World() = default;

MobilityScript World::build_script() const {
  MobilityScript s;
  for (int i = 1; i <= cfg_.num_users; ++i) {
    s.steps.push_back({0, static_cast<MnId>(i), MobilityEventKind::ATTACH_LTE});
  }
  if (cfg_.architecture == Architecture::NO_OFFLOAD) return s;

  const auto sel = map_offload_to_movers(cfg_.offload_percent, cfg_.num_users);

  if (cfg_.mobility_mode == MobilityMode::STATIC_DUAL) {
    if (cfg_.architecture == Architecture::SIFM) {
      // Everyone adds a WiFi leg; the policy decides which flows use it.
      for (int i = 1; i <= cfg_.num_users; ++i) {
        const TimeUs at = kDualAttachAtUs +
                          static_cast<TimeUs>(i - 1) * kDualStaggerUs;
        s.steps.push_back(
            {at, static_cast<MnId>(i), MobilityEventKind::ATTACH_WIFI});
      }
    } else {
      // The baseline can only move whole users.
      for (std::size_t i = 0; i < sel.movers.size(); ++i) {
        const TimeUs at = kDualAttachAtUs +
                          static_cast<TimeUs>(i) * kDualStaggerUs;
        s.steps.push_back({at, sel.movers[i], MobilityEventKind::DETACH_LTE});
        s.steps.push_back({at + kPmipBreakGapUs, sel.movers[i],
                           MobilityEventKind::ATTACH_WIFI});
      }
    }
    return s;
  }

  const TimeUs return_at = static_cast<TimeUs>(
      std::llround(kReturnFraction * static_cast<double>(duration_us_)));
  for (std::size_t i = 0; i < sel.movers.size(); ++i) {
    const MnId mn = sel.movers[i];
    const TimeUs out_at = kOffloadAtUs + static_cast<TimeUs>(i) *
                                             kMoveStaggerUs;
    const TimeUs back_at = return_at + static_cast<TimeUs>(i) *
                                           kMoveStaggerUs;
    if (cfg_.architecture == Architecture::SIFM) {
      s.steps.push_back({out_at, mn, MobilityEventKind::ATTACH_WIFI});
      if (cfg_.full_handover) {
        s.steps.push_back(
            {out_at + kFullHandoverGapUs, mn, MobilityEventKind::DETACH_LTE});
        s.steps.push_back({back_at, mn, MobilityEventKind::ATTACH_LTE});
        s.steps.push_back({back_at + kFullHandoverGapUs, mn,
                           MobilityEventKind::DETACH_WIFI});
      } else {
        s.steps.push_back({back_at, mn, MobilityEventKind::DETACH_WIFI});
      }
    } else {
      s.steps.push_back({out_at, mn, MobilityEventKind::DETACH_LTE});
      s.steps.push_back(
          {out_at + kPmipBreakGapUs, mn, MobilityEventKind::ATTACH_WIFI});
      s.steps.push_back({back_at, mn, MobilityEventKind::DETACH_WIFI});
      s.steps.push_back(
          {back_at + kPmipBreakGapUs, mn, MobilityEventKind::ATTACH_LTE});
    }
  }
  return s;
}

void World::build() {
  built_ = true;

  LteDownlink::Config lte_cfg;
  lte_cfg.rlc_limit_bytes = cfg_.rlc_buffer_bytes;
  lte_ = std::make_unique<LteDownlink>(sim_, lte_cfg);
  lte_->set_deliver(
      [this](MnId mn, const PacketPtr& pkt) { ue_receive(mn, pkt, Via::LTE); });
  lte_->start();

  wifi_ = std::make_unique<WifiMedium>(sim_, WifiMedium::Config{});

  lte_uplink_ = std::make_unique<Pipe>(&sim_, 40e6, 1000);
  internet_up_ = std::make_unique<Pipe>(&sim_, 1e9, 2000);

  if (cfg_.architecture == Architecture::PMIPV6) {
    lma_ = std::make_unique<Lma>(
        Lma::Config{kLmaId, kLmaTunnelIp, kLmaPoolBase, 4096});
    mag_lte_ = std::make_unique<Mag>(
        Mag::Config{kMagLteId, kPgwTunnelIp, kLmaId, 64});
    mag_wifi_ = std::make_unique<Mag>(
        Mag::Config{kMagWifiId, kWagTunnelIp, kLmaId, 64});
    internet_to_lma_ = std::make_unique<Pipe>(&sim_, 1e9, 2000);
    lma_to_mag_lte_ = std::make_unique<Pipe>(&sim_, 1e9, 1000);
    lma_to_mag_wifi_ = std::make_unique<Pipe>(&sim_, 1e9, 1000);
    ctrl_maglte_lma_ = std::make_unique<DelayLine>(&sim_, kControlHopUs);
    ctrl_lma_maglte_ = std::make_unique<DelayLine>(&sim_, kControlHopUs);
    ctrl_magwifi_lma_ = std::make_unique<DelayLine>(&sim_, kControlHopUs);
    ctrl_lma_magwifi_ = std::make_unique<DelayLine>(&sim_, kControlHopUs);
  } else {
    pgw_ = std::make_unique<MobilityAgent>(MobilityAgent::Config{
        kPgwId, MaRole::LTE, kPgwTunnelIp, kPgwPoolBase, 4096});
    wag_ = std::make_unique<MobilityAgent>(MobilityAgent::Config{
        kWagId, MaRole::WIFI, kWagTunnelIp, kWagPoolBase, 4096});

    PolicyConfig pol;
    switch (cfg_.policy) {
      case OffloadSelection::NONE:
        pol.kind = PolicyKind::NO_OFFLOAD;
        break;
      case OffloadSelection::FULL:
        if (cfg_.mobility_mode == MobilityMode::MOVING) {
          pol.kind = PolicyKind::FULL_ON_WIFI_ATTACH;
        } else {
          pol.kind = PolicyKind::SELECTIVE;
          pol.protocols = {Protocol::TCPLIKE, Protocol::UDPLIKE};
          pol.budget_bps = static_cast<std::uint64_t>(
              offload_budget_bps(cfg_.offload_percent));
        }
        break;
      case OffloadSelection::TCP_ONLY:
      case OffloadSelection::UDP_ONLY:
        pol.kind = PolicyKind::SELECTIVE;
        pol.protocols = {cfg_.policy == OffloadSelection::TCP_ONLY
                             ? Protocol::TCPLIKE
                             : Protocol::UDPLIKE};
        pol.budget_bps = static_cast<std::uint64_t>(
            offload_budget_bps(cfg_.offload_percent));
        break;
    }
    fc_ = std::make_unique<FlowController>(kPgwId, kWagId, pol);

    internet_to_pgw_ = std::make_unique<Pipe>(&sim_, 1e9, 2000);
    internet_to_wag_ = std::make_unique<Pipe>(&sim_, 1e9, 2000);
    pgw_to_wag_ = std::make_unique<Pipe>(&sim_, 1e9, 1000);
    wag_to_pgw_ = std::make_unique<Pipe>(&sim_, 1e9, 1000);
    ctrl_pgw_fc_ = std::make_unique<DelayLine>(&sim_, kControlHopUs);
    ctrl_fc_pgw_ = std::make_unique<DelayLine>(&sim_, kControlHopUs);
    ctrl_wag_fc_ = std::make_unique<DelayLine>(&sim_, kControlHopUs);
    ctrl_fc_wag_ = std::make_unique<DelayLine>(&sim_, kControlHopUs);
  }

  for (int i = 1; i <= cfg_.num_users; ++i) {
    const MnId mn = static_cast<MnId>(i);
    Ue ue;
    ue.mn = mn;
    ue.logical = std::make_unique<UeLogicalInterface>(
        mn, [this](const PacketPtr& pkt, Via, TimeUs now) {
          app_deliver(pkt, now);
        });
    ues_.emplace(mn, std::move(ue));
  }

  for (const MobilityStep& step : script_.steps) {
    sim_.at(step.at, [this, step] { apply_step(step); });
  }
}

void World::apply_step(const MobilityStep& step) {
  if (cfg_.architecture == Architecture::PMIPV6) {
    switch (step.event) {
      case MobilityEventKind::ATTACH_LTE:
        pmip_attach(step.mn, *mag_lte_);
        break;
      case MobilityEventKind::DETACH_LTE:
        pmip_detach(step.mn, *mag_lte_);
        break;
      case MobilityEventKind::ATTACH_WIFI:
        pmip_attach(step.mn, *mag_wifi_);
        break;
      case MobilityEventKind::DETACH_WIFI:
        pmip_detach(step.mn, *mag_wifi_);
        break;
    }
    return;
  }
  switch (step.event) {
    case MobilityEventKind::ATTACH_LTE:
      sifm_attach(step.mn, *pgw_);
      break;
    case MobilityEventKind::DETACH_LTE:
      sifm_detach(step.mn, *pgw_);
      break;
    case MobilityEventKind::ATTACH_WIFI:
      sifm_attach(step.mn, *wag_);
      break;
    case MobilityEventKind::DETACH_WIFI:
      sifm_detach(step.mn, *wag_);
      break;
  }
}

void World::sifm_attach(MnId mn, MobilityAgent& ma) {
  const TimeUs now = sim_.now();
  auto res = ma.on_ue_attach(mn, now);
  if (res.error) {
    warnings.push_back("attach rejected for mn " + std::to_string(mn));
    return;
  }
  Ue& ue = ues_.at(mn);
  const bool is_lte = (&ma == pgw_.get());
  if (is_lte) {
    lte_->attach(mn);
    ue.lte_attached = true;
    ue.lte_addr = res.record.mn_ip;
    ue.logical->activate(Via::LTE);
    // Tunnel-everything applies only while the LTE anchor is down.
    for (const auto& app : apps_) {
      if (app->mn == mn) metrics_.clear_tunnel_expectation(mn, app->key);
    }
  } else {
    ue.wifi_attached = true;
    ue.wifi_addr = res.record.mn_ip;
    ue.logical->activate(Via::WIFI);
    if (ue.apps_created) open_handover_pendings(mn, now, Via::WIFI);
  }
  ue.logical->bind(res.record.mn_ip);
  if (res.binding_update) send_to_fc(ma.config().id, *res.binding_update);
  ensure_apps(mn, res.record.mn_ip, now);
}

void World::sifm_detach(MnId mn, MobilityAgent& ma) {
  const TimeUs now = sim_.now();
  auto res = ma.on_ue_detach(mn, now);
  if (res.error) {
    warnings.push_back("detach of unattached mn " + std::to_string(mn));
    return;
  }
  Ue& ue = ues_.at(mn);
  const bool is_lte = (&ma == pgw_.get());
  if (is_lte) {
    lte_->detach(mn);
    ue.lte_attached = false;
    ue.logical->deactivate(Via::LTE);
    if (ue.wifi_attached) {
      for (const auto& app : apps_) {
        if (app->mn == mn) metrics_.expect_tunnel(mn, app->key, now);
      }
    }
  } else {
    ue.wifi_attached = false;
    ue.logical->deactivate(Via::WIFI);
    for (const auto& app : apps_) {
      if (app->mn == mn) metrics_.clear_tunnel_expectation(mn, app->key);
    }
    if (ue.lte_attached) open_handover_pendings(mn, now, Via::LTE);
  }
  if (res.port_status) send_to_fc(ma.config().id, *res.port_status);
}

DelayLine& World::control_line_to_fc(MaId from) {
  return from == kPgwId ? *ctrl_pgw_fc_ : *ctrl_wag_fc_;
}

DelayLine& World::control_line_from_fc(MaId to) {
  return to == kPgwId ? *ctrl_fc_pgw_ : *ctrl_fc_wag_;
}

void World::send_to_fc(MaId from, const ControlMessage& msg) {
  ++control_messages_;
  auto bytes = encode(msg);
  control_line_to_fc(from).send([this, bytes = std::move(bytes)] {
    auto r = decode(bytes);
    if (!r.ok()) {
      ++control_decode_errors_;
      return;
    }
    const TimeUs now = sim_.now();
    if (r.message->type() == MsgType::BINDING_UPDATE) {
      const MaId origin = std::get<BindingUpdate>(r.message->body).ma_id;
      auto out = fc_->handle_binding_update(*r.message, now);
      deliver_fc_ack(out.ack, origin);
      deliver_flow_mods(out.flow_mods);
    } else if (r.message->type() == MsgType::PORT_STATUS) {
      deliver_flow_mods(fc_->handle_port_status(*r.message, now));
    } else {
      warnings.push_back("unexpected message type at controller");
    }
  });
}

void World::deliver_fc_ack(const ControlMessage& ack, MaId to) {
  ++control_messages_;
  auto bytes = encode(ack);
  control_line_from_fc(to).send([this, bytes = std::move(bytes), to] {
    auto r = decode(bytes);
    if (!r.ok()) {
      ++control_decode_errors_;
      return;
    }
    MobilityAgent* ma = (to == kPgwId) ? pgw_.get() : wag_.get();
    ma->on_binding_ack(std::get<BindingAck>(r.message->body));
  });
}

void World::deliver_flow_mods(const std::vector<FlowMod>& mods) {
  for (const FlowMod& mod : mods) {
    ControlMessage msg{next_ctrl_xid_++, mod};
    ++control_messages_;
    auto bytes = encode(msg);
    const MaId to = mod.ma_id;
    control_line_from_fc(to).send([this, bytes = std::move(bytes), to] {
      auto r = decode(bytes);
      if (!r.ok()) {
        ++control_decode_errors_;
        return;
      }
      MobilityAgent* ma = (to == kPgwId) ? pgw_.get() : wag_.get();
      auto err = ma->apply_flow_mod(std::get<FlowMod>(r.message->body),
                                    sim_.now());
      if (err) warnings.push_back("flow mod addressed to the wrong agent");
    });
  }
}

void World::gateway_ingress(MobilityAgent& ma, const PacketPtr& pkt,
                            PortId ingress) {
  auto d = ma.route_downlink(pkt, ingress, sim_.now());
  using Kind = MobilityAgent::ForwardingDecision::Kind;
  switch (d.kind) {
    case Kind::DELIVER_LOCAL:
      if (&ma == pgw_.get()) {
        deliver_lte(d.mn, pkt);
      } else {
        transmit_wifi_dl(d.mn, pkt);
      }
      break;
    case Kind::SEND_TUNNEL: {
      const bool from_pgw = (&ma == pgw_.get());
      Pipe& pipe = from_pgw ? *pgw_to_wag_ : *wag_to_pgw_;
      MobilityAgent* peer = from_pgw ? wag_.get() : pgw_.get();
      pipe.send(pkt->wire_bytes(), [this, peer, pkt] {
        gateway_ingress(*peer, pkt, kTunnelIngressPort);
      });
      break;
    }
    case Kind::DROP:
      break;
  }
}

void World::pmip_attach(MnId mn, Mag& mag) {
  const TimeUs now = sim_.now();
  Ue& ue = ues_.at(mn);
  const bool is_lte = (&mag == mag_lte_.get());
  if (is_lte) {
    lte_->attach(mn);
    ue.lte_attached = true;
    ue.logical->activate(Via::LTE);
  } else {
    ue.wifi_attached = true;
    ue.logical->activate(Via::WIFI);
  }
  if (ue.apps_created) {
    open_handover_pendings(mn, now, is_lte ? Via::LTE : Via::WIFI);
  }
  const PortId port = ++next_mag_port_[mag.config().id];
  send_to_lma(mag, mag.on_ue_attach(mn, port, now));
}

void World::pmip_detach(MnId mn, Mag& mag) {
  const TimeUs now = sim_.now();
  Ue& ue = ues_.at(mn);
  if (&mag == mag_lte_.get()) {
    lte_->detach(mn);
    ue.lte_attached = false;
    ue.logical->deactivate(Via::LTE);
  } else {
    ue.wifi_attached = false;
    ue.logical->deactivate(Via::WIFI);
  }
  send_to_lma(mag, mag.on_ue_detach(mn, now));
}

void World::send_to_lma(Mag& from, const ControlMessage& msg) {
  ++control_messages_;
  auto bytes = encode(msg);
  DelayLine& up = (&from == mag_lte_.get()) ? *ctrl_maglte_lma_
                                            : *ctrl_magwifi_lma_;
  up.send([this, bytes = std::move(bytes)] {
    auto r = decode(bytes);
    if (!r.ok()) {
      ++control_decode_errors_;
      return;
    }
    auto out = lma_->handle_pbu(*r.message, sim_.now());
    const auto& pba = std::get<ProxyBindingAck>(out.pba.body);
    Mag* to = (pba.mag_id == kMagLteId) ? mag_lte_.get() : mag_wifi_.get();
    DelayLine& down = (to == mag_lte_.get()) ? *ctrl_lma_maglte_
                                             : *ctrl_lma_magwifi_;
    ++control_messages_;
    auto pba_bytes = encode(out.pba);
    down.send([this, pba_bytes = std::move(pba_bytes), to] {
      auto r2 = decode(pba_bytes);
      if (!r2.ok()) {
        ++control_decode_errors_;
        return;
      }
      auto res = to->on_pba(*r2.message, sim_.now());
      if (!res.accepted) return;
      const MnId mn = res.mn;
      const Address home = res.home_address;
      sim_.after(cfg_.ra_config_delay_us, [this, to, mn, home] {
        if (to->phase(mn) != MagPhase::CONFIGURING) return;
        const TimeUs now = sim_.now();
        auto flushed = to->on_configuration_complete(mn, now);
        Ue& ue = ues_.at(mn);
        if (ue.pmip_home == 0) {
          ue.pmip_home = home;
          ue.logical->bind(home);
          ensure_apps(mn, home, now);
        }
        for (const auto& pkt : flushed) deliver_via_access(*to, mn, pkt);
      });
    });
  });
}

void World::lma_ingress(const PacketPtr& pkt) {
  const LmaBinding* b = lma_->lookup_home(pkt->key.dst_addr);
  if (b == nullptr || b->mag_id == 0) {
    ++lma_no_route_drops_;
    return;
  }
  Mag* mag = (b->mag_id == kMagLteId) ? mag_lte_.get() : mag_wifi_.get();
  pkt->encap.push_back(
      EncapHeader{lma_->config().lma_ip, mag->config().mag_ip, b->mag_id});
  ++pkt->encap_pushes;
  Pipe& pipe = (b->mag_id == kMagLteId) ? *lma_to_mag_lte_
                                        : *lma_to_mag_wifi_;
  const MnId mn = b->mn_id;
  pipe.send(pkt->wire_bytes(),
            [this, mag, mn, pkt] { mag_ingress(*mag, mn, pkt); });
}

void World::mag_ingress(Mag& mag, MnId mn, const PacketPtr& pkt) {
  if (!pkt->encap.empty()) {
    pkt->encap.pop_back();
    ++pkt->encap_pops;
  }
  if (mag.accept_downlink(pkt, mn, sim_.now())) {
    deliver_via_access(mag, mn, pkt);
  }
}

void World::deliver_via_access(Mag& mag, MnId mn, const PacketPtr& pkt) {
  if (&mag == mag_lte_.get()) {
    deliver_lte(mn, pkt);
  } else {
    transmit_wifi_dl(mn, pkt);
  }
}

void World::ensure_apps(MnId mn, Address addr, TimeUs now) {
  Ue& ue = ues_.at(mn);
  if (ue.apps_created) return;
  ue.apps_created = true;
  const TimeUs base = std::max(now, kTrafficStartUs);
  create_app(mn, Protocol::TCPLIKE, addr, kTcpAppPort,
             base + static_cast<TimeUs>(apps_.size()) * kFlowStaggerUs);
  create_app(mn, Protocol::UDPLIKE, addr, kUdpAppPort,
             base + static_cast<TimeUs>(apps_.size()) * kFlowStaggerUs);
}

World::App* World::create_app(MnId mn, Protocol proto, Address dst,
                              std::uint16_t dst_port, TimeUs start_at) {
  auto app = std::make_unique<App>();
  App* a = app.get();
  a->mn = mn;
  a->proto = proto;
  a->key = FlowKey{kRemoteHost, dst, kRemotePort, dst_port, proto};

  if (proto == Protocol::TCPLIKE) {
    ReliableSender::Config rc;
    rc.payload_bytes = kAppPayloadBytes;
    rc.window_cap_segments = cfg_.window_cap_segments;
    a->sender = std::make_unique<ReliableSender>(
        sim_, a->key, mn, rc, [this](const PacketPtr& p) {
          if (p->id == 0) p->id = next_packet_id_++;
          inject_downlink(p);
        });
    a->receiver = std::make_unique<ReliableReceiver>(
        [this](const PacketPtr& p, TimeUs t) { metrics_.note_delivered(p, t); },
        [this, a](const AckInfo& info, TimeUs t) {
          send_ack_uplink(*a, info, t);
        });
  }

  TrafficSource::Config tc;
  tc.kind = cfg_.traffic;
  tc.mean_interval_us =
      8e6 * kAppPayloadBytes / static_cast<double>(kAppRateBps);
  tc.seed = flow_seed(mn, proto, dst_port);
  TrafficSource::EmitFn emit;
  if (proto == Protocol::TCPLIKE) {
    emit = [this, a](TimeUs t) {
      metrics_.note_submitted(a->mn, a->key, t);
      a->sender->submit(t);
    };
  } else {
    emit = [this, a](TimeUs t) {
      auto p = std::make_shared<Packet>();
      p->id = next_packet_id_++;
      p->key = a->key;
      p->mn = a->mn;
      p->payload_bytes = kAppPayloadBytes;
      p->seq = a->udp_seq++;
      p->created_at = t;
      metrics_.note_submitted(p);
      inject_downlink(p);
    };
  }
  a->source = std::make_unique<TrafficSource>(sim_, tc, std::move(emit));
  a->source->start(start_at);

  by_key_[a->key] = a;
  apps_.push_back(std::move(app));
  if (fc_) register_flow_with_fc(*a, sim_.now());
  return a;
}

void World::register_flow_with_fc(const App& app, TimeUs now) {
  deliver_flow_mods(
      fc_->note_flow(FlowInfo{app.key, app.mn, kAppRateBps}, now));
}

void World::inject_downlink(const PacketPtr& pkt) {
  if (pkt->id == 0) pkt->id = next_packet_id_++;
  if (cfg_.architecture == Architecture::PMIPV6) {
    internet_to_lma_->send(pkt->wire_bytes(),
                           [this, pkt] { lma_ingress(pkt); });
    return;
  }
  const Address dst = pkt->key.dst_addr;
  if (prefix16(dst) == prefix16(kPgwPoolBase)) {
    internet_to_pgw_->send(pkt->wire_bytes(), [this, pkt] {
      gateway_ingress(*pgw_, pkt, kUpstreamIngressPort);
    });
  } else if (prefix16(dst) == prefix16(kWagPoolBase)) {
    internet_to_wag_->send(pkt->wire_bytes(), [this, pkt] {
      gateway_ingress(*wag_, pkt, kUpstreamIngressPort);
    });
  } else {
    ++unroutable_drops_;
  }
}

void World::deliver_lte(MnId mn, const PacketPtr& pkt) {
  lte_->enqueue(mn, pkt);
}

void World::transmit_wifi_dl(MnId mn, const PacketPtr& pkt) {
  wifi_->transmit(pkt->wire_bytes(), true, [this, mn, pkt] {
    if (!ues_.at(mn).wifi_attached) {
      ++wifi_stale_drops_;
      return;
    }
    ue_receive(mn, pkt, Via::WIFI);
  });
}

void World::ue_receive(MnId mn, const PacketPtr& pkt, Via via) {
  Ue& ue = ues_.at(mn);
  if (!ue.logical->receive(pkt, via, sim_.now())) ++ue_reject_drops_;
}

void World::app_deliver(const PacketPtr& pkt, TimeUs now) {
  auto it = by_key_.find(pkt->key);
  if (it == by_key_.end()) {
    ++ue_reject_drops_;
    return;
  }
  App& app = *it->second;
  if (app.proto == Protocol::UDPLIKE) {
    pkt->delivered_at = now;
    metrics_.note_delivered(pkt, now);
  } else {
    app.receiver->on_segment(pkt, now);
  }
}

void World::send_ack_uplink(App& app, const AckInfo& info, TimeUs) {
  Ue& ue = ues_.at(app.mn);
  App* a = &app;
  auto to_remote = [this, a, info] {
    internet_up_->send(kAckBytes, [this, a, info] {
      a->sender->on_ack(info, sim_.now());
    });
  };
  if (ue.lte_attached) {
    lte_uplink_->send(kAckBytes, to_remote);
  } else if (ue.wifi_attached) {
    wifi_->transmit(kAckBytes, false, to_remote);
  }
  // Attached nowhere: the ack is lost and the sender's timer recovers.
}

void World::open_handover_pendings(MnId mn, TimeUs trigger, Via target) {
  for (const auto& app : apps_) {
    if (app->mn == mn) {
      metrics_.open_handover(mn, app->key, trigger, target);
    }
  }
}

void World::schedule_new_flow(TimeUs at, MnId mn, Protocol proto) {
  sim_.at(at, [this, mn, proto] {
    Ue& ue = ues_.at(mn);
    Address dst = 0;
    if (cfg_.architecture == Architecture::PMIPV6) {
      dst = ue.pmip_home;
    } else if (ue.wifi_attached && !ue.lte_attached) {
      dst = ue.wifi_addr;
    } else {
      dst = ue.lte_addr;
    }
    if (dst == 0) {
      warnings.push_back("new flow skipped: mn " + std::to_string(mn) +
                         " has no address");
      return;
    }
    create_app(mn, proto, dst, next_extra_port_++, sim_.now() + 1000);
  });
}

World::App* World::app_of(MnId mn, Protocol proto) {
  for (const auto& app : apps_) {
    if (app->mn == mn && app->proto == proto) return app.get();
  }
  return nullptr;
}

std::uint64_t World::flow_seed(MnId mn, Protocol proto,
                               std::uint16_t dst_port) const {
  std::uint64_t z = cfg_.seed;
  z += 0x9E3779B97F4A7C15ULL *
       (mn * 4 + static_cast<std::uint64_t>(proto) * 2 + 1);
  z += dst_port;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RunResult World::run() {
  RunResult res;
  if (built_) {
    res.ok = false;
    res.error = "a world can only run once";
    return res;
  }
  auto errors = cfg_.validate();
  if (!errors.empty()) {
    res.ok = false;
    for (const auto& e : errors) {
      if (!res.error.empty()) res.error += "; ";
      res.error += e;
    }
    return res;
  }
  script_ = build_script();
  auto script_errors = script_.validate();
  if (!script_errors.empty()) {
    res.ok = false;
    for (const auto& e : script_errors) {
      if (!res.error.empty()) res.error += "; ";
      res.error += e;
    }
    return res;
  }
  build();
  sim_.at(duration_us_, [this] {
    for (auto& app : apps_) app->source->stop();
  });
  sim_.run_until(duration_us_);

  // Drain: sources have stopped, but congested runs still hold queued data
  // and unacknowledged segments.  Cutting the run off here would censor
  // exactly the packets with the largest delays, so keep stepping until the
  // transports and radio queues are empty.  The delay census is keyed on
  // created_at, which stays inside [warmup, duration).
  auto drained = [this] {
    for (const auto& app : apps_) {
      if (app->sender && (app->sender->inflight() > 0 || app->sender->backlog() > 0))
        return false;
    }
    for (const auto& [mn, ue] : ues_) {
      if (lte_->queue_bytes(mn) > 0) return false;
    }
    return wifi_->dl_backlog_bytes() == 0;
  };
  const TimeUs drain_cap = duration_us_ + 600'000'000;
  TimeUs drain_end = duration_us_;
  while (drain_end < drain_cap && !drained()) {
    drain_end += 1'000'000;
    sim_.run_until(drain_end);
#ifdef SIFM_DRAIN_TRACE
    if ((drain_end - duration_us_) % 10'000'000 == 0) {
      std::uint64_t infl = 0, back = 0, tmo = 0, frx = 0;
      for (const auto& app : apps_) {
        if (!app->sender) continue;
        infl += app->sender->inflight();
        back += app->sender->backlog();
        tmo += app->sender->timeouts;
        frx += app->sender->fast_retransmits;
      }
      const App* stuck = nullptr;
      for (const auto& app : apps_) {
        if (app->sender && (app->sender->backlog() > 0 || app->sender->inflight() > 0)) {
          stuck = app.get();
          break;
        }
      }
      std::fprintf(stderr,
                   "drain t=%llds infl=%llu back=%llu tmo=%llu frx=%llu rlc_drop=%llu",
                   static_cast<long long>((drain_end - duration_us_) / 1'000'000),
                   static_cast<unsigned long long>(infl),
                   static_cast<unsigned long long>(back),
                   static_cast<unsigned long long>(tmo),
                   static_cast<unsigned long long>(frx),
                   static_cast<unsigned long long>(lte_->rlc_drops));
      if (stuck) {
        const auto& s = *stuck->sender;
        const auto& r = *stuck->receiver;
        std::fprintf(stderr,
                     " mn=%u cwnd=%.1f ss=%.1f infl=%zu back=%zu rto=%lldms "
                     "tmo=%llu sacked=%llu soldest=%llu rnext=%llu rbuf=%zu q=%llu",
                     stuck->mn, s.cwnd_segments(), s.ssthresh_segments(),
                     s.inflight(), s.backlog(),
                     static_cast<long long>(s.current_rto_us() / 1000),
                     static_cast<unsigned long long>(s.timeouts),
                     static_cast<unsigned long long>(s.acked_through()),
                     static_cast<unsigned long long>(s.oldest_unacked()),
                     static_cast<unsigned long long>(r.next_expected()),
                     r.buffered(),
                     static_cast<unsigned long long>(lte_->queue_bytes(stuck->mn)));
      }
      std::fprintf(stderr, "\n");
    }
#endif
  }
  if (!drained()) {
    std::uint64_t left = 0;
    for (const auto& app : apps_) {
      if (app->sender) left += app->sender->inflight() + app->sender->backlog();
    }
    warnings.push_back("drain incomplete after " +
                       std::to_string((drain_end - duration_us_) / 1'000'000) +
                       "s: " + std::to_string(left) + " segments outstanding");
  }

  res.summary = summarize(metrics_, cfg_.scenario_id,
                          to_string(cfg_.architecture), cfg_.num_users,
                          cfg_.offload_percent, to_string(cfg_.policy),
                          cfg_.seed);
  res.handovers = metrics_.handovers();
  res.tunnel_violations = metrics_.tunnel_violations;
  res.tunneled_deliveries = metrics_.tunneled_deliveries;
  res.encap_balance_violations = metrics_.encap_balance_violations;
  for (const auto& app : apps_) {
    if (app->sender) res.flow_resets += app->sender->resets;
  }
  res.rlc_drops = lte_->rlc_drops;
  res.wifi_dl_drops = wifi_->dl_queue_drops + wifi_stale_drops_;
  if (mag_lte_) res.mag_buffer_drops += mag_lte_->buffer_drops;
  if (mag_wifi_) res.mag_buffer_drops += mag_wifi_->buffer_drops;
  res.ue_reject_drops = ue_reject_drops_;
  res.control_messages = control_messages_;
  res.control_decode_errors = control_decode_errors_;

  res.warnings = warnings;
  auto take = [&res](const std::vector<std::string>& more) {
    res.warnings.insert(res.warnings.end(), more.begin(), more.end());
  };
  if (fc_) take(fc_->warnings);
  if (pgw_) take(pgw_->warnings);
  if (wag_) take(wag_->warnings);
  if (lma_) take(lma_->warnings);
  if (mag_lte_) take(mag_lte_->warnings);
  if (mag_wifi_) take(mag_wifi_->warnings);
  return res;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  World world(cfg);
  return world.run();
}

}  // namespace sifm

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sifm/event_queue.hpp"
#include "sifm/flow_controller.hpp"
#include "sifm/links.hpp"
#include "sifm/lte.hpp"
#include "sifm/metrics.hpp"
#include "sifm/mobility.hpp"
#include "sifm/mobility_agent.hpp"
#include "sifm/pmipv6.hpp"
#include "sifm/reliable.hpp"
#include "sifm/scenario.hpp"
#include "sifm/traffic.hpp"
#include "sifm/ue.hpp"
#include "sifm/wifi.hpp"

namespace sifm {

// Fixed identities and constants of the desk-scale topology.
constexpr MaId kPgwId = 1;
constexpr MaId kWagId = 2;
constexpr MaId kLmaId = 10;
constexpr MaId kMagLteId = 11;
constexpr MaId kMagWifiId = 12;
constexpr Address kRemoteHost = 0x08080808;
constexpr Address kPgwPoolBase = 0x0A000002;   // 10.0.0.2
constexpr Address kWagPoolBase = 0x0A010002;   // 10.1.0.2
constexpr Address kLmaPoolBase = 0x0A020002;   // 10.2.0.2
constexpr Address kPgwTunnelIp = 0xC0A80101;   // 192.168.1.1
constexpr Address kWagTunnelIp = 0xC0A80102;
constexpr Address kLmaTunnelIp = 0xC0A80110;
constexpr TimeUs kWarmupUs = 2'000'000;

struct RunResult {
  bool ok = true;
  std::string error;  // set when the config was rejected
  SummaryRow summary;
  std::vector<HandoverRecord> handovers;
  std::vector<std::string> warnings;

  std::uint64_t tunnel_violations = 0;
  std::uint64_t tunneled_deliveries = 0;
  std::uint64_t encap_balance_violations = 0;
  std::uint64_t flow_resets = 0;
  std::uint64_t rlc_drops = 0;
  std::uint64_t wifi_dl_drops = 0;
  std::uint64_t mag_buffer_drops = 0;
  std::uint64_t ue_reject_drops = 0;
  std::uint64_t control_messages = 0;
  std::uint64_t control_decode_errors = 0;
};

// Builds one scenario's topology (gateways, links, controller or anchor,
// UEs, traffic, mobility script), runs it to the configured duration and
// aggregates metrics. Owns every component; tests may inspect them after
// run() returns.
class World {
 public:
  explicit World(ScenarioConfig cfg);
  ~World();

  RunResult run();

  // Starts one extra application flow at `at`, addressed to the access
  // network the UE is attached to at that instant.
  void schedule_new_flow(TimeUs at, MnId mn, Protocol proto);

  struct App {
    MnId mn = 0;
    Protocol proto = Protocol::TCPLIKE;
    FlowKey key;
    std::unique_ptr<TrafficSource> source;
    std::unique_ptr<ReliableSender> sender;      // TCPLIKE only
    std::unique_ptr<ReliableReceiver> receiver;  // TCPLIKE only
    std::uint64_t udp_seq = 1;
  };

  Simulator& simulator() { return sim_; }
  Metrics& metrics() { return metrics_; }
  const ScenarioConfig& config() const { return cfg_; }
  const MobilityScript& script() const { return script_; }
  const std::vector<std::unique_ptr<App>>& apps() const { return apps_; }
  App* app_of(MnId mn, Protocol proto);

  MobilityAgent* pgw() { return pgw_.get(); }
  MobilityAgent* wag() { return wag_.get(); }
  FlowController* fc() { return fc_.get(); }
  Lma* lma() { return lma_.get(); }
  Mag* mag_lte() { return mag_lte_.get(); }
  Mag* mag_wifi() { return mag_wifi_.get(); }
  LteDownlink* lte() { return lte_.get(); }
  WifiMedium* wifi() { return wifi_.get(); }

  std::vector<std::string> warnings;

 private:
  struct Ue {
    MnId mn = 0;
    std::unique_ptr<UeLogicalInterface> logical;
    bool lte_attached = false;
    bool wifi_attached = false;
    Address lte_addr = 0;
    Address wifi_addr = 0;
    Address pmip_home = 0;
    bool apps_created = false;
  };

  void build();
  MobilityScript build_script() const;
  void apply_step(const MobilityStep& step);

  // SIFM side.
  void sifm_attach(MnId mn, MobilityAgent& ma);
  void sifm_detach(MnId mn, MobilityAgent& ma);
  void send_to_fc(MaId from, const ControlMessage& msg);
  void deliver_fc_ack(const ControlMessage& ack, MaId to);
  void deliver_flow_mods(const std::vector<FlowMod>& mods);
  void gateway_ingress(MobilityAgent& ma, const PacketPtr& pkt,
                       PortId ingress);

  // PMIPv6 side.
  void pmip_attach(MnId mn, Mag& mag);
  void pmip_detach(MnId mn, Mag& mag);
  void send_to_lma(Mag& from, const ControlMessage& msg);
  void lma_ingress(const PacketPtr& pkt);
  void mag_ingress(Mag& mag, MnId mn, const PacketPtr& pkt);
  void deliver_via_access(Mag& mag, MnId mn, const PacketPtr& pkt);

  // Shared plumbing.
  void ensure_apps(MnId mn, Address addr, TimeUs now);
  App* create_app(MnId mn, Protocol proto, Address dst, std::uint16_t dst_port,
                  TimeUs start_at);
  void register_flow_with_fc(const App& app, TimeUs now);
  void inject_downlink(const PacketPtr& pkt);
  void deliver_lte(MnId mn, const PacketPtr& pkt);
  void transmit_wifi_dl(MnId mn, const PacketPtr& pkt);
  void ue_receive(MnId mn, const PacketPtr& pkt, Via via);
  void app_deliver(const PacketPtr& pkt, TimeUs now);
  void send_ack_uplink(App& app, const AckInfo& info, TimeUs now);
  void open_handover_pendings(MnId mn, TimeUs trigger, Via target);
  DelayLine& control_line_to_fc(MaId from);
  DelayLine& control_line_from_fc(MaId to);
  std::uint64_t flow_seed(MnId mn, Protocol proto,
                          std::uint16_t dst_port) const;

  ScenarioConfig cfg_;
  TimeUs duration_us_ = 0;
  Simulator sim_;
  Metrics metrics_;
  MobilityScript script_;

  std::unique_ptr<MobilityAgent> pgw_;
  std::unique_ptr<MobilityAgent> wag_;
  std::unique_ptr<FlowController> fc_;
  std::unique_ptr<Lma> lma_;
  std::unique_ptr<Mag> mag_lte_;
  std::unique_ptr<Mag> mag_wifi_;
  std::unique_ptr<LteDownlink> lte_;
  std::unique_ptr<WifiMedium> wifi_;

  // Data-plane pipes (downlink direction unless noted).
  std::unique_ptr<Pipe> internet_to_pgw_;
  std::unique_ptr<Pipe> internet_to_wag_;
  std::unique_ptr<Pipe> internet_to_lma_;
  std::unique_ptr<Pipe> pgw_to_wag_;
  std::unique_ptr<Pipe> wag_to_pgw_;
  std::unique_ptr<Pipe> lma_to_mag_lte_;
  std::unique_ptr<Pipe> lma_to_mag_wifi_;
  std::unique_ptr<Pipe> lte_uplink_;      // shared UE -> gateway
  std::unique_ptr<Pipe> internet_up_;     // gateway -> remote host

  // Control-plane delay lines.
  std::unique_ptr<DelayLine> ctrl_pgw_fc_;
  std::unique_ptr<DelayLine> ctrl_fc_pgw_;
  std::unique_ptr<DelayLine> ctrl_wag_fc_;
  std::unique_ptr<DelayLine> ctrl_fc_wag_;
  std::unique_ptr<DelayLine> ctrl_maglte_lma_;
  std::unique_ptr<DelayLine> ctrl_lma_maglte_;
  std::unique_ptr<DelayLine> ctrl_magwifi_lma_;
  std::unique_ptr<DelayLine> ctrl_lma_magwifi_;

  std::map<MnId, Ue> ues_;
  std::vector<std::unique_ptr<App>> apps_;
  std::map<FlowKey, App*> by_key_;
  std::map<MaId, PortId> next_mag_port_;

  std::uint64_t next_packet_id_ = 1;
  std::uint32_t next_ctrl_xid_ = 1;
  std::uint16_t next_extra_port_ = 6000;
  std::uint64_t control_messages_ = 0;
  std::uint64_t control_decode_errors_ = 0;
  std::uint64_t ue_reject_drops_ = 0;
  std::uint64_t wifi_stale_drops_ = 0;
  std::uint64_t lma_no_route_drops_ = 0;
  std::uint64_t unroutable_drops_ = 0;
  bool built_ = false;
};

RunResult run_scenario(const ScenarioConfig& cfg);

}  // namespace sifm

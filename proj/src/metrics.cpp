#include "sifm/metrics.hpp"

#include <cstdio>

namespace sifm {

namespace {

std::string fmt(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

}  // namespace

const char* SummaryRow::csv_header() {
  return "scenario_id,architecture,num_users,offload_percent,policy,seed,"
         "mean_delay_ms,tcp_delay_ms,udp_delay_ms,mean_tput_mbps,"
         "tcp_tput_mbps,udp_tput_mbps,loss_pct,tcp_loss_pct,udp_loss_pct,"
         "handover_delay_ms";
}

std::string SummaryRow::csv_row() const {
  std::string out;
  out += scenario_id;
  out += ',';
  out += architecture;
  out += ',';
  out += std::to_string(num_users);
  out += ',';
  out += std::to_string(offload_percent);
  out += ',';
  out += policy;
  out += ',';
  out += std::to_string(seed);
  for (const auto* v :
       {&mean_delay_ms, &tcp_delay_ms, &udp_delay_ms, &mean_tput_mbps,
        &tcp_tput_mbps, &udp_tput_mbps, &loss_pct, &tcp_loss_pct,
        &udp_loss_pct, &handover_delay_ms}) {
    out += ',';
    out += fmt(*v);
  }
  return out;
}

void Metrics::note_submitted(const PacketPtr& pkt) {
  note_submitted(pkt->mn, pkt->key, pkt->created_at);
}

void Metrics::note_submitted(MnId mn, const FlowKey& key, TimeUs created_at) {
  if (created_at < warmup_ || created_at >= end_) return;
  FlowStats& fs = flows_[{mn, key}];
  fs.protocol = key.protocol;
  ++fs.sent;
}

void Metrics::note_delivered(const PacketPtr& pkt, TimeUs now) {
  const FlowId id{pkt->mn, pkt->key};

  if (pkt->encap_pushes != pkt->encap_pops || !pkt->encap.empty()) {
    ++encap_balance_violations;
  }

  auto exp = tunnel_expected_from_.find(id);
  if (exp != tunnel_expected_from_.end() && now > exp->second) {
    if (pkt->delivered_via == Via::WIFI && pkt->encap_pushes == 1 &&
        pkt->encap_pops == 1) {
      ++tunneled_deliveries;
    } else {
      ++tunnel_violations;
    }
  }

  auto pend = pending_.find(id);
  if (pend != pending_.end() && now >= pend->second.trigger &&
      pkt->delivered_via == pend->second.target) {
    records_.push_back(HandoverRecord{pkt->mn, pkt->key, pend->second.trigger,
                                      now});
    pending_.erase(pend);
  }

  if (pkt->created_at >= warmup_ && pkt->created_at < end_) {
    FlowStats& fs = flows_[id];
    fs.protocol = pkt->key.protocol;
    ++fs.delivered;
    if (pkt->encap_pushes > 0) ++fs.tunneled;
    fs.delay_sum_us += static_cast<double>(now - pkt->created_at);
    if (fs.first_delivery == 0) fs.first_delivery = now;
    fs.last_delivery = now;
  }
  if (now >= warmup_ && now < end_) {
    FlowStats& fs = flows_[id];
    fs.protocol = pkt->key.protocol;
    fs.delivered_window_bytes += pkt->payload_bytes;
  }
}

void Metrics::open_handover(MnId mn, const FlowKey& key, TimeUs trigger,
                            Via target) {
  pending_[{mn, key}] = PendingHandover{trigger, target};
}

void Metrics::expect_tunnel(MnId mn, const FlowKey& key, TimeUs from) {
  tunnel_expected_from_[{mn, key}] = from;
}

void Metrics::clear_tunnel_expectation(MnId mn, const FlowKey& key) {
  tunnel_expected_from_.erase({mn, key});
}

std::optional<double> Metrics::mean_handover_ms() const {
  if (records_.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& r : records_) {
    sum += static_cast<double>(r.completion - r.trigger);
  }
  return sum / static_cast<double>(records_.size()) / 1000.0;
}

SummaryRow summarize(const Metrics& m, std::string scenario_id,
                     std::string architecture, int num_users,
                     int offload_percent, std::string policy,
                     std::uint64_t seed) {
  SummaryRow row;
  row.scenario_id = std::move(scenario_id);
  row.architecture = std::move(architecture);
  row.num_users = num_users;
  row.offload_percent = offload_percent;
  row.policy = std::move(policy);
  row.seed = seed;

  struct Agg {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    double delay_sum_us = 0.0;
    double tput_sum_mbps = 0.0;
    std::uint64_t apps = 0;
  };
  Agg all, tcp, udp;
  const double window_s =
      static_cast<double>(m.end() - m.warmup()) / 1e6;

  for (const auto& [id, fs] : m.flows()) {
    const double tput =
        window_s > 0.0
            ? static_cast<double>(fs.delivered_window_bytes) * 8.0 /
                  window_s / 1e6
            : 0.0;
    for (Agg* a : {&all, fs.protocol == Protocol::TCPLIKE ? &tcp : &udp}) {
      a->sent += fs.sent;
      a->delivered += fs.delivered;
      a->delay_sum_us += fs.delay_sum_us;
      a->tput_sum_mbps += tput;
      a->apps += 1;
    }
  }

  auto delay_ms = [](const Agg& a) -> std::optional<double> {
    if (a.delivered == 0) return std::nullopt;
    return a.delay_sum_us / static_cast<double>(a.delivered) / 1000.0;
  };
  auto tput_mbps = [](const Agg& a) -> std::optional<double> {
    if (a.apps == 0) return std::nullopt;
    return a.tput_sum_mbps / static_cast<double>(a.apps);
  };
  auto loss_pct = [](const Agg& a) -> std::optional<double> {
    if (a.sent == 0) return std::nullopt;
    return 100.0 * static_cast<double>(a.sent - a.delivered) /
           static_cast<double>(a.sent);
  };

  row.mean_delay_ms = delay_ms(all);
  row.tcp_delay_ms = delay_ms(tcp);
  row.udp_delay_ms = delay_ms(udp);
  row.mean_tput_mbps = tput_mbps(all);
  row.tcp_tput_mbps = tput_mbps(tcp);
  row.udp_tput_mbps = tput_mbps(udp);
  row.loss_pct = loss_pct(all);
  row.tcp_loss_pct = loss_pct(tcp);
  row.udp_loss_pct = loss_pct(udp);
  row.handover_delay_ms = m.mean_handover_ms();
  return row;
}

}  // namespace sifm

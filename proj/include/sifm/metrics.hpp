#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sifm/packet.hpp"
#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

// Per-application accounting. "sent" counts application submissions, so
// for reliable flows the gap sent-delivered is end-to-end shortfall, not
// wire drops (retransmissions recover those but show up as delay).
struct FlowStats {
  Protocol protocol = Protocol::TCPLIKE;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t tunneled = 0;  // delivered after crossing a gateway tunnel
  double delay_sum_us = 0.0;
  std::uint64_t delivered_window_bytes = 0;
  TimeUs first_delivery = 0;
  TimeUs last_delivery = 0;
};

struct HandoverRecord {
  MnId mn = 0;
  FlowKey key;
  TimeUs trigger = 0;
  TimeUs completion = 0;
};

struct SummaryRow {
  std::string scenario_id;
  std::string architecture;
  int num_users = 0;
  int offload_percent = 0;
  std::string policy;
  std::uint64_t seed = 0;
  std::optional<double> mean_delay_ms;
  std::optional<double> tcp_delay_ms;
  std::optional<double> udp_delay_ms;
  std::optional<double> mean_tput_mbps;
  std::optional<double> tcp_tput_mbps;
  std::optional<double> udp_tput_mbps;
  std::optional<double> loss_pct;
  std::optional<double> tcp_loss_pct;
  std::optional<double> udp_loss_pct;
  std::optional<double> handover_delay_ms;

  std::string csv_row() const;
  static const char* csv_header();
};

// Collects everything a scenario reports: per-flow stats over the
// steady-state window, handover records, and the tunnel/encapsulation
// audit used by the seamlessness checks.
class Metrics {
 public:
  using FlowId = std::pair<MnId, FlowKey>;

  Metrics(TimeUs warmup, TimeUs end) : warmup_(warmup), end_(end) {}

  void note_submitted(const PacketPtr& pkt);
  // For transports that create the segment internally at submit time.
  void note_submitted(MnId mn, const FlowKey& key, TimeUs created_at);
  // Called at final in-order delivery; the packet's delivered_via tells
  // which path carried it.
  void note_delivered(const PacketPtr& pkt, TimeUs now);

  // Handover bookkeeping: a pending opened at the mobility trigger is
  // completed by the first data delivery of that flow over `target`.
  // Pendings still open at scenario end are discarded, not zero-filled.
  void open_handover(MnId mn, const FlowKey& key, TimeUs trigger, Via target);

  // From `from` on, every delivery of this flow must have crossed the
  // inter-gateway tunnel exactly once.
  void expect_tunnel(MnId mn, const FlowKey& key, TimeUs from);
  void clear_tunnel_expectation(MnId mn, const FlowKey& key);

  const std::map<FlowId, FlowStats>& flows() const { return flows_; }
  const std::vector<HandoverRecord>& handovers() const { return records_; }
  std::optional<double> mean_handover_ms() const;

  TimeUs warmup() const { return warmup_; }
  TimeUs end() const { return end_; }

  std::uint64_t tunnel_violations = 0;
  std::uint64_t tunneled_deliveries = 0;
  std::uint64_t encap_balance_violations = 0;

 private:
  struct PendingHandover {
    TimeUs trigger = 0;
    Via target = Via::NONE;
  };

  TimeUs warmup_;
  TimeUs end_;
  std::map<FlowId, FlowStats> flows_;
  std::vector<HandoverRecord> records_;
  std::map<FlowId, PendingHandover> pending_;
  std::map<FlowId, TimeUs> tunnel_expected_from_;
};

// Aggregates flow stats and handover records into one CSV row. The
// identity fields are passed through untouched.
SummaryRow summarize(const Metrics& m, std::string scenario_id,
                     std::string architecture, int num_users,
                     int offload_percent, std::string policy,
                     std::uint64_t seed);

}  // namespace sifm

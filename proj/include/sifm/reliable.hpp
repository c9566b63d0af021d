#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <utility>

#include "sifm/event_queue.hpp"
#include "sifm/packet.hpp"
#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

// Feedback from receiver to sender: the cumulative ack plus up to three
// ranges of out-of-order segments the receiver is holding. Ranges are
// half-open [lo, hi) and sorted ascending. Real transport headers carry
// the same information in a few dozen bytes, so the modeled ack stays a
// small fixed-size frame on the wire.
struct AckInfo {
  std::uint64_t ack_next = 0;
  std::array<std::pair<std::uint64_t, std::uint64_t>, 3> ranges{};
  int num_ranges = 0;
};

// Loss-recovering transport: slow start / AIMD congestion window,
// cumulative acks with selective-ack ranges, fast retransmit on three
// duplicate acks, hole repair driven by the reported ranges, timeout as
// the fallback. Sequence numbers start at 1. The application submits
// segments; a closed window parks them in a backlog, so a segment's
// created_at is when the application first handed it over, which is what
// delay is measured from.
class ReliableSender {
 public:
  struct Config {
    std::uint32_t payload_bytes = 1000;
    std::uint32_t window_cap_segments = 64;
    double initial_ssthresh_segments = 1e9;
    TimeUs rto_initial_us = 1'000'000;
    TimeUs rto_min_us = 1'000'000;
    TimeUs rto_max_us = 60'000'000;
  };

  using SendFn = std::function<void(const PacketPtr&)>;

  ReliableSender(Simulator& sim, FlowKey key, MnId mn, Config cfg, SendFn send)
      : sim_(sim),
        key_(key),
        mn_(mn),
        cfg_(cfg),
        send_(std::move(send)),
        ssthresh_(cfg.initial_ssthresh_segments),
        rto_base_us_(cfg.rto_initial_us) {}

  // Application hands over one segment for transmission.
  void submit(TimeUs now);

  // Ack processing. Every sequence number below ack_next is acknowledged;
  // the ranges mark segments held out of order, whose gaps are repairable
  // losses. The plain overload is a range-free ack.
  void on_ack(const AckInfo& info, TimeUs now);
  void on_ack(std::uint64_t ack_next, TimeUs now) {
    AckInfo info;
    info.ack_next = ack_next;
    on_ack(info, now);
  }

  double cwnd_segments() const { return cwnd_; }
  double ssthresh_segments() const { return ssthresh_; }
  std::size_t inflight() const { return inflight_.size(); }
  std::size_t backlog() const { return backlog_.size(); }
  std::uint64_t acked_through() const { return last_ack_next_; }
  std::uint64_t oldest_unacked() const {
    return inflight_.empty() ? next_seq_ : inflight_.begin()->first;
  }
  TimeUs current_rto_us() const;
  const FlowKey& key() const { return key_; }

  std::uint64_t segments_submitted = 0;
  std::uint64_t wire_sends = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t fast_retransmits = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t resets = 0;  // this transport never resets a flow

 private:
  struct Outstanding {
    PacketPtr segment;
    TimeUs first_wire_at = 0;
    std::uint32_t tx_count = 0;
    bool sacked = false;
  };

  void try_send(TimeUs now);
  void arm_timer(TimeUs now);
  void cancel_timer() { ++timer_epoch_; }
  void on_timeout(TimeUs now);
  void resend(Outstanding& o);
  void retransmit_oldest(TimeUs now);
  bool repair_one(TimeUs now);
  void observe_rtt(TimeUs sample_us);
  std::size_t window_limit() const;

  Simulator& sim_;
  FlowKey key_;
  MnId mn_;
  Config cfg_;
  SendFn send_;

  std::uint64_t next_seq_ = 1;
  std::deque<PacketPtr> backlog_;
  std::map<std::uint64_t, Outstanding> inflight_;

  double cwnd_ = 1.0;
  double ssthresh_;
  double srtt_us_ = -1.0;
  double rttvar_us_ = 0.0;
  TimeUs rto_base_us_;
  std::uint32_t backoff_ = 1;
  std::uint64_t timer_epoch_ = 0;

  // Duplicate-ack bookkeeping for fast retransmit and hole repair.
  std::uint64_t last_ack_next_ = 0;
  int dup_acks_ = 0;
  bool in_recovery_ = false;
  std::uint64_t recovery_high_ = 0;
  std::uint64_t highest_sacked_ = 0;  // one past the highest reported seq
};

// Receiving side: reorder buffer plus cumulative acks. Segments are
// released to the deliver callback strictly in sequence order; a hole
// created by a loss holds everything behind it (that head-of-line wait is
// the delay the retransmission mechanism inflates).
class ReliableReceiver {
 public:
  using DeliverFn = std::function<void(const PacketPtr&, TimeUs)>;
  using AckFn = std::function<void(const AckInfo&, TimeUs)>;

  ReliableReceiver(DeliverFn deliver, AckFn ack)
      : deliver_(std::move(deliver)), ack_(std::move(ack)) {}

  void on_segment(const PacketPtr& pkt, TimeUs now);

  std::uint64_t next_expected() const { return next_expected_; }
  std::size_t buffered() const { return buffer_.size(); }

  std::uint64_t duplicate_segments = 0;
  std::uint64_t delivered_segments = 0;

 private:
  DeliverFn deliver_;
  AckFn ack_;
  std::uint64_t next_expected_ = 1;
  std::map<std::uint64_t, PacketPtr> buffer_;
};

}  // namespace sifm

#include "sifm/reliable.hpp"

#include <algorithm>
#include <cmath>

namespace sifm {

void ReliableSender::submit(TimeUs now) {
  auto pkt = std::make_shared<Packet>();
  pkt->key = key_;
  pkt->mn = mn_;
  pkt->payload_bytes = cfg_.payload_bytes;
  pkt->seq = next_seq_++;
  pkt->created_at = now;
  ++segments_submitted;
  backlog_.push_back(std::move(pkt));
  try_send(now);
}

std::size_t ReliableSender::window_limit() const {
  auto w = static_cast<std::size_t>(cwnd_);
  w = std::max<std::size_t>(w, 1);
  return std::min<std::size_t>(w, cfg_.window_cap_segments);
}

void ReliableSender::try_send(TimeUs now) {
  const bool was_idle = inflight_.empty();
  while (!backlog_.empty() && inflight_.size() < window_limit()) {
    PacketPtr pkt = backlog_.front();
    backlog_.pop_front();
    pkt->first_tx_at = now;
    inflight_.emplace(pkt->seq, Outstanding{pkt, now, 1});
    ++wire_sends;
    send_(pkt);
  }
  if (was_idle && !inflight_.empty()) arm_timer(now);
}

void ReliableSender::on_ack(const AckInfo& info, TimeUs now) {
  const std::uint64_t ack_next = info.ack_next;
  // Mark what the receiver reports holding out of order. Everything below
  // the highest reported sequence that is neither acked nor reported is a
  // known loss, repairable without waiting out a timer.
  for (int i = 0; i < info.num_ranges; ++i) {
    const auto [lo, hi] = info.ranges[i];
    for (auto it = inflight_.lower_bound(lo);
         it != inflight_.end() && it->first < hi; ++it)
      it->second.sacked = true;
    if (hi > highest_sacked_) highest_sacked_ = hi;
  }

  if (ack_next <= last_ack_next_) {
    // Cumulative ack did not advance: the receiver got something out of
    // order. Three in a row signal a lost head segment; resend it without
    // waiting for the timer (the timeout path stays as the fallback when
    // too little is in flight to produce duplicates). Once in recovery,
    // each further duplicate reports one more delivery, paying for the
    // next known hole to be repaired.
    if (ack_next == last_ack_next_ && !inflight_.empty()) {
      ++dup_acks_;
      if (!in_recovery_ && dup_acks_ == 3) {
        in_recovery_ = true;
        recovery_high_ = next_seq_ - 1;
        ssthresh_ = std::max(cwnd_ / 2.0, 2.0);
        cwnd_ = ssthresh_;
        ++fast_retransmits;
        if (!repair_one(now)) retransmit_oldest(now);
        cancel_timer();
        arm_timer(now);
      } else if (in_recovery_) {
        repair_one(now);
      }
    }
    return;
  }

  last_ack_next_ = ack_next;
  dup_acks_ = 0;

  std::uint64_t newly_acked = 0;
  TimeUs rtt_sample = 0;
  bool have_sample = false;
  while (!inflight_.empty() && inflight_.begin()->first < ack_next) {
    auto it = inflight_.begin();
    // Only the oldest erased segment can carry an RTT sample: its arrival is
    // what advanced the ack. Anything above it may have been sitting in the
    // receiver's reorder buffer since long before this ack, so measuring it
    // now would wildly inflate the estimate. Karn's rule additionally skips
    // retransmitted segments, whose samples are ambiguous.
    if (newly_acked == 0 && it->second.tx_count == 1) {
      rtt_sample = now - it->second.first_wire_at;
      have_sample = true;
    }
    inflight_.erase(it);
    ++newly_acked;
  }
  if (newly_acked == 0) return;  // stale or duplicate ack

  if (have_sample) observe_rtt(rtt_sample);
  backoff_ = 1;

  if (in_recovery_) {
    if (ack_next > recovery_high_) {
      in_recovery_ = false;
    } else if (!inflight_.empty()) {
      // Partial ack: the next hole in the same loss burst. Resend it
      // immediately instead of stalling until the timer. Without range
      // information the head of the window is the best guess.
      if (!repair_one(now) && highest_sacked_ <= oldest_unacked())
        retransmit_oldest(now);
    }
  }
  if (!in_recovery_) {
    for (std::uint64_t i = 0; i < newly_acked; ++i) {
      if (cwnd_ < ssthresh_) {
        cwnd_ += 1.0;
      } else {
        cwnd_ += 1.0 / cwnd_;
      }
    }
    cwnd_ = std::min(cwnd_, static_cast<double>(cfg_.window_cap_segments));
  }

  cancel_timer();
  if (!inflight_.empty()) arm_timer(now);
  try_send(now);
}

void ReliableSender::observe_rtt(TimeUs sample_us) {
  const double r = static_cast<double>(sample_us);
  if (srtt_us_ < 0) {
    srtt_us_ = r;
    rttvar_us_ = r / 2.0;
  } else {
    rttvar_us_ = 0.75 * rttvar_us_ + 0.25 * std::abs(srtt_us_ - r);
    srtt_us_ = 0.875 * srtt_us_ + 0.125 * r;
  }
  const double rto = srtt_us_ + std::max(4.0 * rttvar_us_, 1.0);
  rto_base_us_ = std::clamp<TimeUs>(static_cast<TimeUs>(std::llround(rto)),
                                    cfg_.rto_min_us, cfg_.rto_max_us);
}

TimeUs ReliableSender::current_rto_us() const {
  const double rto = static_cast<double>(rto_base_us_) * backoff_;
  return static_cast<TimeUs>(
      std::min(rto, static_cast<double>(cfg_.rto_max_us)));
}

void ReliableSender::arm_timer(TimeUs now) {
  const std::uint64_t epoch = ++timer_epoch_;
  sim_.at(now + current_rto_us(), [this, epoch] {
    if (epoch == timer_epoch_) on_timeout(sim_.now());
  });
}

void ReliableSender::on_timeout(TimeUs now) {
  if (inflight_.empty()) return;
  ++timeouts;
  ssthresh_ = std::max(cwnd_ / 2.0, 2.0);
  cwnd_ = 1.0;
  if (backoff_ < 64) backoff_ *= 2;
  dup_acks_ = 0;
  // Everything sent so far is suspect. Staying in recovery makes each ack
  // advance resend the next hole right away instead of waiting out another
  // timer period per hole.
  in_recovery_ = true;
  recovery_high_ = next_seq_ - 1;
  retransmit_oldest(now);
  arm_timer(now);
}

// Resends one outstanding segment. A fresh copy is sent because the
// original pointer may still sit in some queue downstream; the receiver
// dedups by sequence number.
void ReliableSender::resend(Outstanding& o) {
  auto clone = std::make_shared<Packet>(*o.segment);
  clone->id = 0;
  clone->is_retransmission = true;
  clone->encap.clear();
  clone->encap_pushes = 0;
  clone->encap_pops = 0;
  clone->delivered_via = Via::NONE;
  clone->delivered_at = 0;
  o.segment = clone;
  ++o.tx_count;
  ++retransmissions;
  ++wire_sends;
  send_(clone);
}

void ReliableSender::retransmit_oldest(TimeUs) {
  resend(inflight_.begin()->second);
}

// Repairs the oldest known hole: the lowest outstanding segment below the
// highest range the receiver reported, not itself reported, and not already
// repaired once (a repair that is lost again falls back to the timer).
bool ReliableSender::repair_one(TimeUs) {
  for (auto& [seq, o] : inflight_) {
    if (seq >= highest_sacked_) break;
    if (!o.sacked && o.tx_count == 1) {
      resend(o);
      return true;
    }
  }
  return false;
}

void ReliableReceiver::on_segment(const PacketPtr& pkt, TimeUs now) {
  if (pkt->seq < next_expected_ || buffer_.count(pkt->seq) != 0) {
    ++duplicate_segments;
  } else {
    buffer_.emplace(pkt->seq, pkt);
    while (!buffer_.empty() && buffer_.begin()->first == next_expected_) {
      auto it = buffer_.begin();
      it->second->delivered_at = now;
      ++delivered_segments;
      deliver_(it->second, now);
      buffer_.erase(it);
      ++next_expected_;
    }
  }
  AckInfo info;
  info.ack_next = next_expected_;
  for (auto it = buffer_.begin();
       it != buffer_.end() && info.num_ranges < 3;) {
    std::uint64_t lo = it->first;
    std::uint64_t hi = lo + 1;
    ++it;
    while (it != buffer_.end() && it->first == hi) {
      ++hi;
      ++it;
    }
    info.ranges[static_cast<std::size_t>(info.num_ranges++)] = {lo, hi};
  }
  ack_(info, now);
}

}  // namespace sifm

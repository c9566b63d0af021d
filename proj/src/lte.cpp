#include "sifm/lte.hpp"

#include <vector>

namespace sifm {

void LteDownlink::start() {
  if (started_) return;
  started_ = true;
  sim_.after(cfg_.tti_us, [this] { tick(); });
}

void LteDownlink::attach(MnId mn) { queues_.try_emplace(mn); }

void LteDownlink::detach(MnId mn) {
  auto it = queues_.find(mn);
  if (it == queues_.end()) return;
  detach_flush_drops += it->second.packets.size();
  queues_.erase(it);
}

bool LteDownlink::enqueue(MnId mn, const PacketPtr& pkt) {
  auto it = queues_.find(mn);
  if (it == queues_.end()) {
    ++unattached_drops;
    return false;
  }
  Queue& q = it->second;
  const std::uint64_t wire = pkt->wire_bytes();
  if (q.bytes + wire > cfg_.rlc_limit_bytes) {
    ++rlc_drops;
    return false;
  }
  q.packets.push_back(pkt);
  q.bytes += wire;
  return true;
}

std::uint64_t LteDownlink::queue_bytes(MnId mn) const {
  auto it = queues_.find(mn);
  return it == queues_.end() ? 0 : it->second.bytes;
}

void LteDownlink::tick() {
  std::uint64_t remaining = grant_bytes_per_tti() + carry_;
  carry_ = 0;

  std::vector<Queue*> active;
  active.reserve(queues_.size());

  while (remaining > 0) {
    active.clear();
    for (auto& [mn, q] : queues_) {
      if (!q.packets.empty()) active.push_back(&q);
    }
    if (active.empty()) {
      // Idle airtime is gone; only sub-share rounding may carry over.
      remaining = 0;
      break;
    }

    const std::uint64_t share = remaining / active.size();
    if (share == 0) break;

    for (Queue* q : active) {
      q->credit += share;
      remaining -= share;
      while (!q->packets.empty()) {
        const PacketPtr& front = q->packets.front();
        const std::uint64_t wire = front->wire_bytes();
        if (wire > q->credit) break;
        q->credit -= wire;
        q->bytes -= wire;
        PacketPtr pkt = front;
        q->packets.pop_front();
        ++delivered_packets;
        delivered_bytes += wire;
        if (deliver_) deliver_(pkt->mn, pkt);
      }
      if (q->packets.empty()) {
        // An emptied queue hands its unused credit back so the other
        // backlogged UEs can use the capacity this same TTI.
        remaining += q->credit;
        q->credit = 0;
      }
    }
  }
  carry_ = remaining;

  sim_.after(cfg_.tti_us, [this] { tick(); });
}

}  // namespace sifm

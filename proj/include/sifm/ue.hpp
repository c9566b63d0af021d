#pragma once

#include <functional>
#include <set>

#include "sifm/packet.hpp"
#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

// One interface as seen by the UE's applications. Physical attachments
// come and go underneath it; a packet is accepted whenever its
// destination is any address ever bound here, no matter which
// sub-interface carried it. That indifference is what lets a flow keep
// its address across a path change.
class UeLogicalInterface {
 public:
  using DeliverFn = std::function<void(const PacketPtr&, Via, TimeUs)>;

  UeLogicalInterface(MnId mn, DeliverFn deliver)
      : mn_(mn), deliver_(std::move(deliver)) {}

  void bind(Address a) { bound_.insert(a); }
  void unbind(Address a) { bound_.erase(a); }
  void activate(Via v) { active_.insert(v); }
  void deactivate(Via v) { active_.erase(v); }

  bool accepts(Address dst) const { return bound_.count(dst) != 0; }
  bool active(Via v) const { return active_.count(v) != 0; }
  const std::set<Address>& bound() const { return bound_; }
  MnId mn() const { return mn_; }

  // Returns true when the packet went up the stack.
  bool receive(const PacketPtr& pkt, Via arrived_via, TimeUs now) {
    if (!accepts(pkt->key.dst_addr)) {
      ++rejected_drops;
      return false;
    }
    pkt->delivered_via = arrived_via;
    ++accepted_packets;
    if (deliver_) deliver_(pkt, arrived_via, now);
    return true;
  }

  std::uint64_t accepted_packets = 0;
  std::uint64_t rejected_drops = 0;

 private:
  MnId mn_;
  DeliverFn deliver_;
  std::set<Address> bound_;
  std::set<Via> active_;
};

}  // namespace sifm

#pragma once

// Seeded generators for protocol messages and flow-table inputs, shared by
// the unit and acceptance suites.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "sifm/flow_table.hpp"
#include "sifm/messages.hpp"

namespace testgen {

using Rng = std::mt19937_64;

inline std::uint64_t u64(Rng& rng) { return rng(); }
inline std::uint32_t u32(Rng& rng) { return static_cast<std::uint32_t>(rng()); }
inline std::uint16_t u16(Rng& rng) { return static_cast<std::uint16_t>(rng()); }
inline bool coin(Rng& rng) { return rng() & 1; }

inline sifm::FlowKey flow_key(Rng& rng, int space = 0) {
  // space > 0 narrows the value domain so collisions (and thus real
  // matches against wildcards) actually happen in property tests.
  auto pick = [&](std::uint32_t wide) {
    return space > 0 ? wide % space : wide;
  };
  sifm::FlowKey k;
  k.src_addr = pick(u32(rng));
  k.dst_addr = pick(u32(rng));
  k.src_port = static_cast<std::uint16_t>(pick(u16(rng)));
  k.dst_port = static_cast<std::uint16_t>(pick(u16(rng)));
  k.protocol = coin(rng) ? sifm::Protocol::TCPLIKE : sifm::Protocol::UDPLIKE;
  return k;
}

inline sifm::MatchFields match_fields(Rng& rng, int space = 4) {
  sifm::MatchFields m;
  if (coin(rng)) m.src_addr = u32(rng) % space;
  if (coin(rng)) m.dst_addr = u32(rng) % space;
  if (coin(rng)) m.src_port = static_cast<std::uint16_t>(u16(rng) % space);
  if (coin(rng)) m.dst_port = static_cast<std::uint16_t>(u16(rng) % space);
  if (coin(rng))
    m.protocol = coin(rng) ? sifm::Protocol::TCPLIKE : sifm::Protocol::UDPLIKE;
  if (coin(rng)) m.ingress_port = u32(rng) % space;
  return m;
}

inline sifm::Instruction instruction(Rng& rng) {
  switch (rng() % 5) {
    case 0: return sifm::Instruction::forward(u32(rng));
    case 1: return sifm::Instruction::tunnel(u64(rng));
    case 2: return sifm::Instruction::decap_forward(u32(rng));
    case 3: return sifm::Instruction::drop();
    default: return sifm::Instruction::default_route();
  }
}

inline sifm::ControlMessage control_message(Rng& rng) {
  sifm::ControlMessage msg;
  msg.xid = u32(rng);
  switch (rng() % 6) {
    case 0: {
      sifm::BindingUpdate m;
      m.mn_id = u64(rng);
      m.ma_id = u64(rng);
      m.mn_ip = u32(rng);
      m.ma_ip = u32(rng);
      m.port_id = u32(rng);
      m.status = coin(rng) ? sifm::AttachStatus::ATTACHED
                           : sifm::AttachStatus::DETACHED;
      msg.body = m;
      break;
    }
    case 1: {
      sifm::BindingAck m;
      m.mn_id = u64(rng);
      m.ma_id = u64(rng);
      m.result = coin(rng) ? sifm::Result::OK : sifm::Result::ERROR;
      if (coin(rng)) m.old_mn_ip = u32(rng);
      msg.body = m;
      break;
    }
    case 2: {
      sifm::FlowMod m;
      m.ma_id = u64(rng);
      m.match = match_fields(rng, 1 << 30);
      m.priority =
          m.match.fully_wildcarded() ? std::uint16_t{0} : u16(rng);
      m.instruction = instruction(rng);
      m.idle_timeout_us = coin(rng) ? u64(rng) >> 20 : 0;
      msg.body = m;
      break;
    }
    case 3: {
      sifm::PortStatusUpdate m;
      m.mn_id = u64(rng);
      m.ma_id = u64(rng);
      m.port_id = u32(rng);
      m.status = coin(rng) ? sifm::AttachStatus::ATTACHED
                           : sifm::AttachStatus::DETACHED;
      msg.body = m;
      break;
    }
    case 4: {
      sifm::ProxyBindingUpdate m;
      m.mn_id = u64(rng);
      m.mag_id = u64(rng);
      m.lifetime_s = u32(rng);
      msg.body = m;
      break;
    }
    default: {
      sifm::ProxyBindingAck m;
      m.mn_id = u64(rng);
      m.mag_id = u64(rng);
      m.home_prefix = u32(rng);
      m.result = coin(rng) ? sifm::Result::OK : sifm::Result::ERROR;
      msg.body = m;
      break;
    }
  }
  return msg;
}

}  // namespace testgen

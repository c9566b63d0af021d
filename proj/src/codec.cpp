#include "sifm/messages.hpp"

#include <cassert>
#include <cstring>

namespace sifm {
namespace {

constexpr std::size_t kBindingUpdateLen = kHeaderSize + 29;
constexpr std::size_t kBindingAckLen = kHeaderSize + 22;
constexpr std::size_t kFlowModLen = kHeaderSize + 45;
constexpr std::size_t kPortStatusLen = kHeaderSize + 21;
constexpr std::size_t kProxyBindingUpdateLen = kHeaderSize + 20;
constexpr std::size_t kProxyBindingAckLen = kHeaderSize + 21;

void put8(std::vector<std::uint8_t>& out, std::uint8_t v) { out.push_back(v); }

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  put32(out, static_cast<std::uint32_t>(v >> 32));
  put32(out, static_cast<std::uint32_t>(v));
}

struct Reader {
  const std::uint8_t* p;
  std::uint8_t u8() { return *p++; }
  std::uint16_t u16() {
    std::uint16_t v = (std::uint16_t(p[0]) << 8) | p[1];
    p += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
                      (std::uint32_t(p[2]) << 8) | p[3];
    p += 4;
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t hi = u32();
    return (hi << 32) | u32();
  }
};

std::size_t encoded_len(MsgType t) {
  switch (t) {
    case MsgType::BINDING_UPDATE: return kBindingUpdateLen;
    case MsgType::BINDING_ACK: return kBindingAckLen;
    case MsgType::FLOW_MOD: return kFlowModLen;
    case MsgType::PORT_STATUS: return kPortStatusLen;
    case MsgType::PROXY_BINDING_UPDATE: return kProxyBindingUpdateLen;
    case MsgType::PROXY_BINDING_ACK: return kProxyBindingAckLen;
  }
  return 0;
}

bool known_type(std::uint8_t t) {
  switch (static_cast<MsgType>(t)) {
    case MsgType::BINDING_UPDATE:
    case MsgType::BINDING_ACK:
    case MsgType::FLOW_MOD:
    case MsgType::PORT_STATUS:
    case MsgType::PROXY_BINDING_UPDATE:
    case MsgType::PROXY_BINDING_ACK:
      return true;
  }
  return false;
}

// Wildcard bitmap bit positions, in the wire field order.
enum : std::uint8_t {
  kWcSrcAddr = 1 << 0,
  kWcDstAddr = 1 << 1,
  kWcSrcPort = 1 << 2,
  kWcDstPort = 1 << 3,
  kWcProtocol = 1 << 4,
  kWcIngress = 1 << 5,
  kWcAllKnown = 0x3F,
};

}  // namespace

MsgType ControlMessage::type() const {
  struct V {
    MsgType operator()(const BindingUpdate&) { return MsgType::BINDING_UPDATE; }
    MsgType operator()(const BindingAck&) { return MsgType::BINDING_ACK; }
    MsgType operator()(const FlowMod&) { return MsgType::FLOW_MOD; }
    MsgType operator()(const PortStatusUpdate&) { return MsgType::PORT_STATUS; }
    MsgType operator()(const ProxyBindingUpdate&) {
      return MsgType::PROXY_BINDING_UPDATE;
    }
    MsgType operator()(const ProxyBindingAck&) {
      return MsgType::PROXY_BINDING_ACK;
    }
  };
  return std::visit(V{}, body);
}

std::string to_string(DecodeError e) {
  switch (e) {
    case DecodeError::NONE: return "NONE";
    case DecodeError::TRUNCATED: return "TRUNCATED";
    case DecodeError::BAD_VERSION: return "BAD_VERSION";
    case DecodeError::UNKNOWN_TYPE: return "UNKNOWN_TYPE";
    case DecodeError::LENGTH_MISMATCH: return "LENGTH_MISMATCH";
    case DecodeError::BAD_FIELD: return "BAD_FIELD";
  }
  return "?";
}

std::string to_string(MsgType t) {
  switch (t) {
    case MsgType::BINDING_UPDATE: return "BINDING_UPDATE";
    case MsgType::BINDING_ACK: return "BINDING_ACK";
    case MsgType::FLOW_MOD: return "FLOW_MOD";
    case MsgType::PORT_STATUS: return "PORT_STATUS";
    case MsgType::PROXY_BINDING_UPDATE: return "PROXY_BINDING_UPDATE";
    case MsgType::PROXY_BINDING_ACK: return "PROXY_BINDING_ACK";
  }
  return "?";
}

std::vector<std::uint8_t> encode(const ControlMessage& msg) {
  const MsgType type = msg.type();
  const std::size_t total = encoded_len(type);
  std::vector<std::uint8_t> out;
  out.reserve(total);
  put8(out, kProtocolVersion);
  put8(out, static_cast<std::uint8_t>(type));
  put16(out, static_cast<std::uint16_t>(total));
  put32(out, msg.xid);

  struct V {
    std::vector<std::uint8_t>& out;

    void operator()(const BindingUpdate& m) {
      put64(out, m.mn_id);
      put64(out, m.ma_id);
      put32(out, m.mn_ip);
      put32(out, m.ma_ip);
      put32(out, m.port_id);
      put8(out, static_cast<std::uint8_t>(m.status));
    }
    void operator()(const BindingAck& m) {
      put64(out, m.mn_id);
      put64(out, m.ma_id);
      put8(out, static_cast<std::uint8_t>(m.result));
      put8(out, m.old_mn_ip ? 1 : 0);
      put32(out, m.old_mn_ip.value_or(0));
    }
    void operator()(const FlowMod& m) {
      assert(!m.match.fully_wildcarded() || m.priority == 0);
      put64(out, m.ma_id);
      std::uint8_t wc = 0;
      if (!m.match.src_addr) wc |= kWcSrcAddr;
      if (!m.match.dst_addr) wc |= kWcDstAddr;
      if (!m.match.src_port) wc |= kWcSrcPort;
      if (!m.match.dst_port) wc |= kWcDstPort;
      if (!m.match.protocol) wc |= kWcProtocol;
      if (!m.match.ingress_port) wc |= kWcIngress;
      put8(out, wc);
      put32(out, m.match.src_addr.value_or(0));
      put32(out, m.match.dst_addr.value_or(0));
      put16(out, m.match.src_port.value_or(0));
      put16(out, m.match.dst_port.value_or(0));
      put8(out, m.match.protocol
                    ? static_cast<std::uint8_t>(*m.match.protocol)
                    : 0);
      put32(out, m.match.ingress_port.value_or(0));
      put16(out, m.priority);
      put8(out, static_cast<std::uint8_t>(m.instruction.kind));
      put64(out, m.instruction.arg);
      put64(out, m.idle_timeout_us);
    }
    void operator()(const PortStatusUpdate& m) {
      put64(out, m.mn_id);
      put64(out, m.ma_id);
      put32(out, m.port_id);
      put8(out, static_cast<std::uint8_t>(m.status));
    }
    void operator()(const ProxyBindingUpdate& m) {
      put64(out, m.mn_id);
      put64(out, m.mag_id);
      put32(out, m.lifetime_s);
    }
    void operator()(const ProxyBindingAck& m) {
      put64(out, m.mn_id);
      put64(out, m.mag_id);
      put32(out, m.home_prefix);
      put8(out, static_cast<std::uint8_t>(m.result));
    }
  };
  std::visit(V{out}, msg.body);
  assert(out.size() == total);
  return out;
}

namespace {

DecodeResult fail(DecodeError e) { return {std::nullopt, 0, e}; }

// Decoding is strict: every accepted byte string is a canonical encoding,
// so encode(decode(buf)) reproduces buf exactly.
DecodeResult decode_body(MsgType type, std::uint32_t xid, Reader r,
                         std::size_t total) {
  ControlMessage msg;
  msg.xid = xid;
  switch (type) {
    case MsgType::BINDING_UPDATE: {
      BindingUpdate m;
      m.mn_id = r.u64();
      m.ma_id = r.u64();
      m.mn_ip = r.u32();
      m.ma_ip = r.u32();
      m.port_id = r.u32();
      std::uint8_t st = r.u8();
      if (st > 1) return fail(DecodeError::BAD_FIELD);
      m.status = static_cast<AttachStatus>(st);
      msg.body = m;
      break;
    }
    case MsgType::BINDING_ACK: {
      BindingAck m;
      m.mn_id = r.u64();
      m.ma_id = r.u64();
      std::uint8_t res = r.u8();
      if (res > 1) return fail(DecodeError::BAD_FIELD);
      m.result = static_cast<Result>(res);
      std::uint8_t has_old = r.u8();
      if (has_old > 1) return fail(DecodeError::BAD_FIELD);
      Address old_ip = r.u32();
      if (has_old) {
        m.old_mn_ip = old_ip;
      } else if (old_ip != 0) {
        return fail(DecodeError::BAD_FIELD);
      }
      msg.body = m;
      break;
    }
    case MsgType::FLOW_MOD: {
      FlowMod m;
      m.ma_id = r.u64();
      std::uint8_t wc = r.u8();
      if (wc & ~kWcAllKnown) return fail(DecodeError::BAD_FIELD);
      Address src = r.u32();
      Address dst = r.u32();
      std::uint16_t sport = r.u16();
      std::uint16_t dport = r.u16();
      std::uint8_t proto = r.u8();
      PortId ingress = r.u32();
      // Wildcarded fields must carry zero value bytes.
      if (wc & kWcSrcAddr) {
        if (src != 0) return fail(DecodeError::BAD_FIELD);
      } else {
        m.match.src_addr = src;
      }
      if (wc & kWcDstAddr) {
        if (dst != 0) return fail(DecodeError::BAD_FIELD);
      } else {
        m.match.dst_addr = dst;
      }
      if (wc & kWcSrcPort) {
        if (sport != 0) return fail(DecodeError::BAD_FIELD);
      } else {
        m.match.src_port = sport;
      }
      if (wc & kWcDstPort) {
        if (dport != 0) return fail(DecodeError::BAD_FIELD);
      } else {
        m.match.dst_port = dport;
      }
      if (wc & kWcProtocol) {
        if (proto != 0) return fail(DecodeError::BAD_FIELD);
      } else {
        if (proto > 1) return fail(DecodeError::BAD_FIELD);
        m.match.protocol = static_cast<Protocol>(proto);
      }
      if (wc & kWcIngress) {
        if (ingress != 0) return fail(DecodeError::BAD_FIELD);
      } else {
        m.match.ingress_port = ingress;
      }
      m.priority = r.u16();
      if (m.match.fully_wildcarded() && m.priority != 0)
        return fail(DecodeError::BAD_FIELD);
      std::uint8_t kind = r.u8();
      if (kind > kMaxInstructionKind) return fail(DecodeError::BAD_FIELD);
      m.instruction.kind = static_cast<InstructionKind>(kind);
      m.instruction.arg = r.u64();
      switch (m.instruction.kind) {
        case InstructionKind::FORWARD:
        case InstructionKind::DECAP_FORWARD:
          if (m.instruction.arg > 0xFFFFFFFFull)
            return fail(DecodeError::BAD_FIELD);
          break;
        case InstructionKind::DROP:
        case InstructionKind::DEFAULT_ROUTE:
          if (m.instruction.arg != 0) return fail(DecodeError::BAD_FIELD);
          break;
        case InstructionKind::TUNNEL:
          break;
      }
      m.idle_timeout_us = r.u64();
      msg.body = m;
      break;
    }
    case MsgType::PORT_STATUS: {
      PortStatusUpdate m;
      m.mn_id = r.u64();
      m.ma_id = r.u64();
      m.port_id = r.u32();
      std::uint8_t st = r.u8();
      if (st > 1) return fail(DecodeError::BAD_FIELD);
      m.status = static_cast<AttachStatus>(st);
      msg.body = m;
      break;
    }
    case MsgType::PROXY_BINDING_UPDATE: {
      ProxyBindingUpdate m;
      m.mn_id = r.u64();
      m.mag_id = r.u64();
      m.lifetime_s = r.u32();
      msg.body = m;
      break;
    }
    case MsgType::PROXY_BINDING_ACK: {
      ProxyBindingAck m;
      m.mn_id = r.u64();
      m.mag_id = r.u64();
      m.home_prefix = r.u32();
      std::uint8_t res = r.u8();
      if (res > 1) return fail(DecodeError::BAD_FIELD);
      m.result = static_cast<Result>(res);
      msg.body = m;
      break;
    }
  }
  return {msg, total, DecodeError::NONE};
}

}  // namespace

DecodeResult decode(std::span<const std::uint8_t> buf) {
  if (buf.size() < kHeaderSize) return fail(DecodeError::TRUNCATED);
  if (buf[0] != kProtocolVersion) return fail(DecodeError::BAD_VERSION);
  if (!known_type(buf[1])) return fail(DecodeError::UNKNOWN_TYPE);
  const MsgType type = static_cast<MsgType>(buf[1]);
  const std::size_t declared = (std::size_t(buf[2]) << 8) | buf[3];
  if (declared != encoded_len(type)) return fail(DecodeError::LENGTH_MISMATCH);
  if (buf.size() < declared) return fail(DecodeError::TRUNCATED);
  const std::uint32_t xid = (std::uint32_t(buf[4]) << 24) |
                            (std::uint32_t(buf[5]) << 16) |
                            (std::uint32_t(buf[6]) << 8) | buf[7];
  Reader r{buf.data() + kHeaderSize};
  return decode_body(type, xid, r, declared);
}

}  // namespace sifm

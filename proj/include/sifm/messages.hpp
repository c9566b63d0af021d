#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sifm/match.hpp"
#include "sifm/types.hpp"

namespace sifm {

// Control-plane wire format. All integers big-endian.
//
//   header (8 bytes):
//     version   1  = 0x05
//     msg_type  1
//     length    2  total encoded size, header included
//     xid       4  transaction id, echoed by replies
//
// Payload layouts are fixed per type; see the structs below.

constexpr std::uint8_t kProtocolVersion = 0x05;
constexpr std::size_t kHeaderSize = 8;

enum class MsgType : std::uint8_t {
  BINDING_UPDATE = 0x01,
  BINDING_ACK = 0x02,
  FLOW_MOD = 0x03,
  PORT_STATUS = 0x04,
  PROXY_BINDING_UPDATE = 0x11,
  PROXY_BINDING_ACK = 0x12,
};

enum class Result : std::uint8_t {
  OK = 0x00,
  ERROR = 0x01,
};

// MA -> FC on UE attach/detach. 29-byte payload:
// mn_id(8) ma_id(8) mn_ip(4) ma_ip(4) port_id(4) status(1)
struct BindingUpdate {
  MnId mn_id = 0;
  MaId ma_id = 0;
  Address mn_ip = 0;
  Address ma_ip = 0;
  PortId port_id = 0;
  AttachStatus status = AttachStatus::DETACHED;

  friend bool operator==(const BindingUpdate&, const BindingUpdate&) = default;
};

// FC -> MA reply. 22-byte payload:
// mn_id(8) ma_id(8) result(1) has_old_ip(1) old_mn_ip(4)
// old_mn_ip is the UE's address at its previous MA, needed by the new MA
// to relate tunneled flows to the address they were established with.
struct BindingAck {
  MnId mn_id = 0;
  MaId ma_id = 0;
  Result result = Result::OK;
  std::optional<Address> old_mn_ip;

  friend bool operator==(const BindingAck&, const BindingAck&) = default;
};

// FC -> MA flow-table modification. 45-byte payload:
// ma_id(8) wildcard_bitmap(1) src_addr(4) dst_addr(4) src_port(2)
// dst_port(2) protocol(1) ingress_port(4) priority(2) instruction_kind(1)
// instruction_arg(8) idle_timeout_us(8)
// Bitmap bit i set means field i is wildcarded, in the field order
// src_addr, dst_addr, src_port, dst_port, protocol, ingress_port.
// Wildcarded value bytes encode as zero.
struct FlowMod {
  MaId ma_id = 0;
  MatchFields match;
  std::uint16_t priority = 0;
  Instruction instruction;
  std::uint64_t idle_timeout_us = 0;  // 0 = no expiry

  friend bool operator==(const FlowMod&, const FlowMod&) = default;
};

// MA -> FC on port state change. 21-byte payload:
// mn_id(8) ma_id(8) port_id(4) status(1)
struct PortStatusUpdate {
  MnId mn_id = 0;
  MaId ma_id = 0;
  PortId port_id = 0;
  AttachStatus status = AttachStatus::DETACHED;

  friend bool operator==(const PortStatusUpdate&,
                         const PortStatusUpdate&) = default;
};

// MAG -> LMA registration. 20-byte payload:
// mn_id(8) mag_id(8) lifetime_s(4)
struct ProxyBindingUpdate {
  MnId mn_id = 0;
  MaId mag_id = 0;
  std::uint32_t lifetime_s = 0;

  friend bool operator==(const ProxyBindingUpdate&,
                         const ProxyBindingUpdate&) = default;
};

// LMA -> MAG reply. 21-byte payload:
// mn_id(8) mag_id(8) home_prefix(4) result(1)
struct ProxyBindingAck {
  MnId mn_id = 0;
  MaId mag_id = 0;
  Address home_prefix = 0;
  Result result = Result::OK;

  friend bool operator==(const ProxyBindingAck&,
                         const ProxyBindingAck&) = default;
};

using MessageBody = std::variant<BindingUpdate, BindingAck, FlowMod,
                                 PortStatusUpdate, ProxyBindingUpdate,
                                 ProxyBindingAck>;

struct ControlMessage {
  std::uint32_t xid = 0;
  MessageBody body;

  MsgType type() const;

  friend bool operator==(const ControlMessage&,
                         const ControlMessage&) = default;
};

enum class DecodeError : std::uint8_t {
  NONE = 0,
  TRUNCATED,        // buffer shorter than the header or the declared length
  BAD_VERSION,      // version byte != 0x05
  UNKNOWN_TYPE,     // msg_type not one of the six
  LENGTH_MISMATCH,  // declared length wrong for the message type
  BAD_FIELD,        // a payload byte holds an unrepresentable value
};

std::string to_string(DecodeError e);
std::string to_string(MsgType t);

struct DecodeResult {
  std::optional<ControlMessage> message;
  std::size_t consumed = 0;
  DecodeError error = DecodeError::NONE;

  bool ok() const { return message.has_value(); }
};

// Serializes msg. The message must satisfy its type invariants
// (encode asserts the fully-wildcarded/priority-0 rule for FlowMod).
std::vector<std::uint8_t> encode(const ControlMessage& msg);

// Parses one message from the front of buf. Trailing bytes are left
// untouched so concatenated encodings can be consumed in sequence.
// Never throws on arbitrary input.
DecodeResult decode(std::span<const std::uint8_t> buf);

}  // namespace sifm

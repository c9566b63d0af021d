#include "sifm/types.hpp"

#include <cstdio>

namespace sifm {

std::string to_string(Protocol p) {
  return p == Protocol::TCPLIKE ? "TCPLIKE" : "UDPLIKE";
}

std::string format_address(Address a) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (a >> 24) & 0xFF,
                (a >> 16) & 0xFF, (a >> 8) & 0xFF, a & 0xFF);
  return buf;
}

std::string to_string(const FlowKey& k) {
  return format_address(k.src_addr) + ":" + std::to_string(k.src_port) +
         "->" + format_address(k.dst_addr) + ":" +
         std::to_string(k.dst_port) + "/" + to_string(k.protocol);
}

}  // namespace sifm

#include <algorithm>
#include <random>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "sifm/messages.hpp"
#include "support/gen.hpp"

using namespace sifm;

namespace {

ControlMessage sample_binding_update() {
  BindingUpdate bu;
  bu.mn_id = 1;
  bu.ma_id = 2;
  bu.mn_ip = 0x0A000002;  // 10.0.0.2
  bu.ma_ip = 0xC0A80101;  // 192.168.1.1
  bu.port_id = 7;
  bu.status = AttachStatus::ATTACHED;
  return ControlMessage{9, bu};
}

}  // namespace

TEST_CASE("binding update frozen wire image") {
  // Hand-assembled expected bytes; independent of the encoder.
  const std::vector<std::uint8_t> expected = {
      0x05, 0x01, 0x00, 0x25, 0x00, 0x00, 0x00, 0x09,  // header, len 37, xid 9
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01,  // mn_id
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x02,  // ma_id
      0x0A, 0x00, 0x00, 0x02,                          // mn_ip
      0xC0, 0xA8, 0x01, 0x01,                          // ma_ip
      0x00, 0x00, 0x00, 0x07,                          // port_id
      0x01,                                            // ATTACHED
  };
  auto got = encode(sample_binding_update());
  CHECK(got.size() == 37);
  CHECK(got == expected);

  auto back = decode(got);
  REQUIRE(back.ok());
  CHECK(back.consumed == 37);
  CHECK(*back.message == sample_binding_update());
}

TEST_CASE("round trip over random messages") {
  testgen::Rng rng(0xC0DEC);
  for (int i = 0; i < 10000; ++i) {
    ControlMessage msg = testgen::control_message(rng);
    auto bytes = encode(msg);
    auto res = decode(bytes);
    REQUIRE(res.ok());
    CHECK(res.consumed == bytes.size());
    CHECK(*res.message == msg);
  }
}

TEST_CASE("concatenated messages decode in sequence") {
  testgen::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    ControlMessage a = testgen::control_message(rng);
    ControlMessage b = testgen::control_message(rng);
    auto bytes = encode(a);
    auto second = encode(b);
    bytes.insert(bytes.end(), second.begin(), second.end());

    auto first = decode(bytes);
    REQUIRE(first.ok());
    CHECK(*first.message == a);
    auto rest = decode(
        std::span<const std::uint8_t>(bytes).subspan(first.consumed));
    REQUIRE(rest.ok());
    CHECK(*rest.message == b);
    CHECK(first.consumed + rest.consumed == bytes.size());
  }
}

TEST_CASE("single byte deletion always yields a typed error") {
  testgen::Rng rng(42);
  for (int i = 0; i < 300; ++i) {
    auto bytes = encode(testgen::control_message(rng));
    for (std::size_t pos = 0; pos < bytes.size(); ++pos) {
      auto damaged = bytes;
      damaged.erase(damaged.begin() + pos);
      auto res = decode(damaged);
      CHECK(!res.ok());
      CHECK(res.error != DecodeError::NONE);
    }
  }
}

TEST_CASE("single byte mutation never crashes and stays canonical") {
  testgen::Rng rng(43);
  for (int i = 0; i < 50; ++i) {
    auto bytes = encode(testgen::control_message(rng));
    for (std::size_t pos = 0; pos < bytes.size(); ++pos) {
      for (int delta : {1, 0x10, 0x80, 0xFF}) {
        auto damaged = bytes;
        damaged[pos] = static_cast<std::uint8_t>(damaged[pos] + delta);
        auto res = decode(damaged);
        if (res.ok()) {
          // Anything accepted must be a canonical encoding.
          CHECK(encode(*res.message) == damaged);
        } else {
          CHECK(res.error != DecodeError::NONE);
        }
      }
    }
  }
}

TEST_CASE("error taxonomy") {
  auto bytes = encode(sample_binding_update());

  SUBCASE("short header") {
    std::vector<std::uint8_t> b(bytes.begin(), bytes.begin() + 5);
    CHECK(decode(b).error == DecodeError::TRUNCATED);
  }
  SUBCASE("bad version") {
    bytes[0] = 0x04;
    CHECK(decode(bytes).error == DecodeError::BAD_VERSION);
  }
  SUBCASE("unknown type") {
    bytes[1] = 0x7E;
    CHECK(decode(bytes).error == DecodeError::UNKNOWN_TYPE);
  }
  SUBCASE("wrong declared length") {
    bytes[3] = 0x24;
    CHECK(decode(bytes).error == DecodeError::LENGTH_MISMATCH);
  }
  SUBCASE("buffer shorter than declared length") {
    bytes.pop_back();
    CHECK(decode(bytes).error == DecodeError::TRUNCATED);
  }
  SUBCASE("status byte out of range") {
    bytes[36] = 0x02;
    CHECK(decode(bytes).error == DecodeError::BAD_FIELD);
  }
}

TEST_CASE("random garbage never crashes the decoder") {
  std::mt19937_64 rng(0xFADE);
  for (int i = 0; i < 100000; ++i) {
    std::vector<std::uint8_t> buf(rng() % 64);
    for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
    auto res = decode(buf);
    if (res.ok()) CHECK(encode(*res.message) == buf);
  }
}

TEST_CASE("flow key ordering is the lexicographic five-tuple order") {
  testgen::Rng rng(11);
  auto as_tuple = [](const FlowKey& k) {
    return std::make_tuple(k.src_addr, k.dst_addr, k.src_port, k.dst_port,
                           k.protocol);
  };
  for (int i = 0; i < 20000; ++i) {
    FlowKey a = testgen::flow_key(rng, 4);
    FlowKey b = testgen::flow_key(rng, 4);
    FlowKey c = testgen::flow_key(rng, 4);
    CHECK((a < b) == (as_tuple(a) < as_tuple(b)));
    CHECK((a == b) == (as_tuple(a) == as_tuple(b)));
    // Strict total order: exactly one of <, ==, > holds; < is transitive.
    int rel = (a < b ? 1 : 0) + (a == b ? 1 : 0) + (b < a ? 1 : 0);
    CHECK(rel == 1);
    if (a < b && b < c) CHECK(a < c);
  }
}

#pragma once

#include <cstdint>
#include <vector>

#include "sifm/match.hpp"
#include "sifm/messages.hpp"
#include "sifm/time.hpp"
#include "sifm/types.hpp"

namespace sifm {

struct FlowTableEntry {
  MatchFields match;
  std::uint16_t priority = 0;
  Instruction instruction;
  std::uint64_t idle_timeout_us = 0;  // 0 = never expires
  std::uint64_t packet_count = 0;
  std::uint64_t byte_count = 0;
  TimeUs installed_at = 0;
  TimeUs last_matched_at = 0;  // installation time until first match
  std::uint64_t install_seq = 0;

  bool expired(TimeUs now) const {
    return idle_timeout_us > 0 && now > last_matched_at &&
           now - last_matched_at > idle_timeout_us;
  }
};

// OpenFlow-style match table. Highest priority wins; ties go to the
// earliest-installed entry. Lookups skip entries whose idle timeout has
// elapsed even before expire_entries() removes them.
class FlowTable {
 public:
  enum class ApplyOutcome { INSTALLED, REPLACED };

  // Replaces the entry with an identical (match, priority), resetting its
  // counters; otherwise inserts a new entry.
  ApplyOutcome apply(const FlowMod& mod, TimeUs now);

  struct MatchResult {
    Instruction instruction = Instruction::default_route();
    bool from_entry = false;  // false: table miss, default routing applies
  };

  // Increments the matched entry's counters and stamps last_matched_at.
  MatchResult match_packet(const FlowKey& key, PortId ingress,
                           std::uint32_t wire_bytes, TimeUs now);

  // Removes expired entries, returns how many.
  std::size_t expire_entries(TimeUs now);

  const std::vector<FlowTableEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<FlowTableEntry> entries_;
  std::uint64_t next_install_seq_ = 0;
};

}  // namespace sifm

#include "sifm/flow_table.hpp"

#include <algorithm>

namespace sifm {

FlowTable::ApplyOutcome FlowTable::apply(const FlowMod& mod, TimeUs now) {
  for (auto& e : entries_) {
    if (e.match == mod.match && e.priority == mod.priority) {
      e.instruction = mod.instruction;
      e.idle_timeout_us = mod.idle_timeout_us;
      e.packet_count = 0;
      e.byte_count = 0;
      e.installed_at = now;
      e.last_matched_at = now;
      // install_seq is kept: a replacement does not change the entry's
      // position in the earliest-installed tie break.
      return ApplyOutcome::REPLACED;
    }
  }
  FlowTableEntry e;
  e.match = mod.match;
  e.priority = mod.priority;
  e.instruction = mod.instruction;
  e.idle_timeout_us = mod.idle_timeout_us;
  e.installed_at = now;
  e.last_matched_at = now;
  e.install_seq = next_install_seq_++;
  entries_.push_back(e);
  return ApplyOutcome::INSTALLED;
}

FlowTable::MatchResult FlowTable::match_packet(const FlowKey& key,
                                               PortId ingress,
                                               std::uint32_t wire_bytes,
                                               TimeUs now) {
  FlowTableEntry* best = nullptr;
  for (auto& e : entries_) {
    if (e.expired(now)) continue;
    if (!e.match.matches(key, ingress)) continue;
    if (!best || e.priority > best->priority ||
        (e.priority == best->priority && e.install_seq < best->install_seq)) {
      best = &e;
    }
  }
  if (!best) return {Instruction::default_route(), false};
  best->packet_count++;
  best->byte_count += wire_bytes;
  best->last_matched_at = now;
  return {best->instruction, true};
}

std::size_t FlowTable::expire_entries(TimeUs now) {
  const auto is_dead = [now](const FlowTableEntry& e) {
    return e.expired(now);
  };
  const std::size_t before = entries_.size();
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(), is_dead),
                 entries_.end());
  return before - entries_.size();
}

}  // namespace sifm

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sifm/time.hpp"

namespace sifm {

// Deterministic event queue: events pop in (time, insertion sequence) order,
// so equal-time events run FIFO regardless of heap internals.
class EventQueue {
 public:
  using Handler = std::function<void()>;

  struct Item {
    TimeUs at;
    std::uint64_t seq;
    Handler fn;
  };

  void schedule(TimeUs at, Handler fn) {
    heap_.push(Item{at, next_seq_++, std::move(fn)});
  }

  // Empty queue means end of simulation.
  std::optional<Item> pop() {
    if (heap_.empty()) return std::nullopt;
    // top() is const; the handler is moved out via const_cast because
    // priority_queue lacks an extracting pop.
    Item item = std::move(const_cast<Item&>(heap_.top()));
    heap_.pop();
    return item;
  }

  std::optional<TimeUs> next_time() const {
    if (heap_.empty()) return std::nullopt;
    return heap_.top().at;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Item, std::vector<Item>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

class Simulator {
 public:
  TimeUs now() const { return now_; }

  void at(TimeUs t, EventQueue::Handler fn) {
    if (t < now_) throw std::logic_error("event scheduled in the past");
    queue_.schedule(t, std::move(fn));
  }

  void after(TimeUs delay, EventQueue::Handler fn) {
    at(now_ + delay, std::move(fn));
  }

  // Runs every event with timestamp <= end, then advances the clock to end.
  void run_until(TimeUs end) {
    while (auto t = queue_.next_time()) {
      if (*t > end) break;
      auto item = queue_.pop();
      now_ = item->at;
      item->fn();
    }
    now_ = end;
  }

  std::size_t pending() const { return queue_.size(); }

 private:
  EventQueue queue_;
  TimeUs now_ = 0;
};

}  // namespace sifm

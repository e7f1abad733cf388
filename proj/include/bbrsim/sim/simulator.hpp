#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

#include "bbrsim/sim/time.hpp"

namespace bbrsim {

// Handle to a scheduled event. Default-constructed handles refer to nothing.
struct EventId {
  SimTime fire_at;
  uint64_t seq = 0;

  bool valid() const { return seq != 0; }
  friend auto operator<=>(const EventId&, const EventId&) = default;
};

// Single-threaded discrete-event engine. Events at equal times run in the
// order they were scheduled. The clock only moves inside RunUntil().
class Simulator {
 public:
  using Action = std::function<void()>;

  Simulator() = default;
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime Now() const { return now_; }

  EventId Schedule(SimTime fire_at, Action action) {
    if (fire_at < now_) {
      throw std::invalid_argument("cannot schedule an event in the past");
    }
    EventId id{fire_at, ++next_seq_};
    events_.emplace(id, std::move(action));
    return id;
  }

  EventId ScheduleIn(Duration delay, Action action) {
    return Schedule(now_ + delay, std::move(action));
  }

  // True iff the event was pending; it will not fire afterwards.
  bool Cancel(const EventId& id) { return events_.erase(id) > 0; }

  bool IsPending(const EventId& id) const { return events_.count(id) > 0; }

  SimTime RunUntil(SimTime t_end) {
    if (t_end < now_) {
      throw std::invalid_argument("RunUntil target precedes the clock");
    }
    while (!events_.empty()) {
      auto it = events_.begin();
      if (it->first.fire_at > t_end) break;
      now_ = it->first.fire_at;
      Action action = std::move(it->second);
      events_.erase(it);
      ++executed_;
      action();
    }
    now_ = t_end;
    return now_;
  }

  size_t pending() const { return events_.size(); }
  uint64_t executed() const { return executed_; }

 private:
  SimTime now_ = SimTime::Zero();
  uint64_t next_seq_ = 0;
  uint64_t executed_ = 0;
  std::map<EventId, Action> events_;
};

}  // namespace bbrsim

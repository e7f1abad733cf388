#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <utility>

namespace bbrsim {

// Sliding-window extremum over (time, value) samples. A sample stamped `t`
// survives while t > now - window. Kept as a monotonic deque, so Update is
// amortized O(1) and the front always holds the best live sample.
template <typename T, typename TimeT, typename WindowT, typename Compare = std::greater<T>>
class WindowedFilter {
 public:
  explicit WindowedFilter(WindowT window) : window_(window) {}

  void Update(T value, TimeT now) {
    Expire(now);
    // Drop samples that can never be best again: older and not better.
    while (!samples_.empty() && !compare_(samples_.back().second, value)) samples_.pop_back();
    samples_.emplace_back(now, value);
  }

  // Best sample still inside the window ending at `now`.
  std::optional<T> GetBest(TimeT now) {
    Expire(now);
    if (samples_.empty()) return std::nullopt;
    return samples_.front().second;
  }

  // Best sample as of the last update, without aging.
  std::optional<T> best() const {
    if (samples_.empty()) return std::nullopt;
    return samples_.front().second;
  }

  void Reset() { samples_.clear(); }
  WindowT window() const { return window_; }
  size_t size() const { return samples_.size(); }

 private:
  void Expire(TimeT now) {
    while (!samples_.empty() && !(samples_.front().first + window_ > now)) samples_.pop_front();
  }

  WindowT window_;
  Compare compare_;
  std::deque<std::pair<TimeT, T>> samples_;
};

}  // namespace bbrsim

#pragma once

#include <algorithm>

#include "bbrsim/sim/time.hpp"

namespace bbrsim {

// Smoothed RTT for loss detection and timers (gain 1/8, variance gain 1/4).
// BBR's own min-RTT filter is separate.
class RttStats {
 public:
  void UpdateRtt(Duration sample) {
    if (sample <= Duration::Zero()) return;
    latest_ = sample;
    if (min_.IsZero() || sample < min_) min_ = sample;
    if (smoothed_.IsZero()) {
      smoothed_ = sample;
      var_ = Duration::Micros(sample.micros() / 2);
      return;
    }
    const int64_t err = std::abs(smoothed_.micros() - sample.micros());
    var_ = Duration::Micros((3 * var_.micros() + err) / 4);
    smoothed_ = Duration::Micros((7 * smoothed_.micros() + sample.micros()) / 8);
  }

  bool has_sample() const { return !smoothed_.IsZero(); }
  Duration latest_rtt() const { return latest_; }
  Duration smoothed_rtt() const { return smoothed_; }
  Duration rtt_var() const { return var_; }
  Duration min_rtt() const { return min_; }

 private:
  Duration latest_ = Duration::Zero();
  Duration smoothed_ = Duration::Zero();
  Duration var_ = Duration::Zero();
  Duration min_ = Duration::Zero();
};

}  // namespace bbrsim

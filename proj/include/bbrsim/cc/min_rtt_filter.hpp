#pragma once

#include "bbrsim/sim/time.hpp"

namespace bbrsim {

// Minimum RTT with a 10 s lifetime. An expired estimate is replaced by the
// next sample whatever its value; the expiry flag is what sends BBR into
// ProbeRTT.
class MinRttFilter {
 public:
  static constexpr Duration kExpiry = Duration::Seconds(10);

  struct Result {
    Duration min_rtt;
    bool expired = false;
  };

  Result Update(Duration rtt_sample, SimTime now) {
    const bool was_expired = Expired(now);
    if (rtt_sample > Duration::Zero() &&
        (!has_sample_ || rtt_sample <= min_rtt_ || was_expired)) {
      min_rtt_ = rtt_sample;
      stamped_at_ = now;
      has_sample_ = true;
    }
    return {min_rtt_, was_expired};
  }

  bool Expired(SimTime now) const { return has_sample_ && now - stamped_at_ > kExpiry; }

  // ProbeRTT completion restarts the lifetime.
  void Refresh(SimTime now) { stamped_at_ = now; }

  bool has_sample() const { return has_sample_; }
  Duration min_rtt() const { return min_rtt_; }
  SimTime stamped_at() const { return stamped_at_; }

 private:
  bool has_sample_ = false;
  Duration min_rtt_ = Duration::Zero();
  SimTime stamped_at_;
};

}  // namespace bbrsim

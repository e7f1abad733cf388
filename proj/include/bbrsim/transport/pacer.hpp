#pragma once

#include <algorithm>

#include "bbrsim/sim/time.hpp"
#include "bbrsim/sim/units.hpp"

namespace bbrsim {

// Release-time pacer. Departures are spaced by size / rate; after idle, at
// most two packets may leave back to back.
class Pacer {
 public:
  static constexpr int kBurstPackets = 2;

  SimTime NextSendTime(SimTime now) const { return std::max(now, next_release_); }

  void OnPacketSent(SimTime now, ByteCount bytes, Bandwidth rate) {
    if (rate.IsZero() || rate == Bandwidth::Infinite()) {
      next_release_ = now;
      return;
    }
    const Duration interval = rate.TransferTime(bytes);
    const Duration credit = interval * static_cast<int64_t>(kBurstPackets - 1);
    if (now.micros() >= static_cast<uint64_t>(credit.micros())) {
      next_release_ = std::max(next_release_, now - credit);
    }
    next_release_ = next_release_ + interval;
  }

 private:
  SimTime next_release_ = SimTime::Zero();
};

// Earliest departure for the next packet given the last one.
inline SimTime PaceNextSend(SimTime last_departure, Bandwidth pacing_rate, ByteCount size,
                            SimTime now) {
  return std::max(now, last_departure + pacing_rate.TransferTime(size));
}

}  // namespace bbrsim

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "bbrsim/net/packet.hpp"
#include "bbrsim/sim/time.hpp"
#include "bbrsim/sim/units.hpp"

namespace bbrsim {

inline constexpr double kStartupPacingGain = 2.0 / std::numbers::ln2;
inline constexpr double kDrainPacingGain = std::numbers::ln2 / 2.0;
inline constexpr double kCwndGain = 2.0;
inline constexpr ByteCount kBbrMinCwnd = 4 * kMaxSegmentSize;
inline constexpr ByteCount kBbrInitialCwnd = 10 * kMaxSegmentSize;
inline constexpr Duration kProbeRttHold = Duration::Millis(200);
// Pacing rate before the first bandwidth sample: initial window per ms.
inline const Bandwidth kBbrInitialPacingRate =
    Bandwidth::FromBytesAndDuration(kBbrInitialCwnd, Duration::Millis(1));

using GainTable = std::array<double, 8>;

// StartUp plateau detection: three consecutive rounds without 25% growth.
class FullBandwidthDetector {
 public:
  static constexpr double kGrowthThreshold = 1.25;
  static constexpr int kRoundsWithoutGrowth = 3;

  // Called once per round with the current max bandwidth.
  bool OnRound(Bandwidth bw) {
    if (reached_) return true;
    if (bw >= full_bw_ * kGrowthThreshold && bw > Bandwidth::Zero()) {
      full_bw_ = bw;
      count_ = 0;
    } else {
      ++count_;
    }
    reached_ = count_ >= kRoundsWithoutGrowth;
    return reached_;
  }

  void MarkReached() { reached_ = true; }
  bool reached() const { return reached_; }
  Bandwidth full_bw() const { return full_bw_; }
  int count() const { return count_; }

 private:
  Bandwidth full_bw_ = Bandwidth::Zero();
  int count_ = 0;
  bool reached_ = false;
};

// RTprop = RTT_min + lambda * sample standard deviation of `rtts`.
// Fewer than two samples leave RTT_min unchanged.
inline Duration RtpropCompensation(Duration rtt_min, const std::vector<Duration>& rtts,
                                   double lambda) {
  if (rtts.size() < 2 || lambda == 0.0) return rtt_min;
  double mean = 0.0;
  for (Duration r : rtts) mean += r.ToSeconds();
  mean /= static_cast<double>(rtts.size());
  double ss = 0.0;
  for (Duration r : rtts) ss += (r.ToSeconds() - mean) * (r.ToSeconds() - mean);
  const double stddev = std::sqrt(ss / static_cast<double>(rtts.size() - 1));
  return rtt_min + Duration::FromSeconds(lambda * stddev);
}

inline ByteCount BdpBytes(Bandwidth bw, Duration rtt) { return bw.BytesIn(rtt); }

}  // namespace bbrsim

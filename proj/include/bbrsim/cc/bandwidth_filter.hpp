#pragma once

#include "bbrsim/cc/congestion_controller.hpp"
#include "bbrsim/cc/windowed_filter.hpp"
#include "bbrsim/sim/units.hpp"

namespace bbrsim {

// Max bandwidth over the last 10 packet-timed rounds.
class BandwidthFilter {
 public:
  static constexpr RoundCount kWindowRounds = 10;

  // App-limited samples only count when they raise the estimate.
  Bandwidth Update(const RateSample& sample, RoundCount round) {
    return Update(sample.bw_es, round, sample.is_app_limited);
  }

  Bandwidth Update(Bandwidth bw, RoundCount round, bool app_limited = false) {
    const Bandwidth current = Get(round);
    if (!app_limited || bw >= current) filter_.Update(bw, round);
    return Get(round);
  }

  Bandwidth Get(RoundCount round) { return filter_.GetBest(round).value_or(Bandwidth::Zero()); }
  Bandwidth best() const { return filter_.best().value_or(Bandwidth::Zero()); }
  bool has_sample() const { return filter_.best().has_value(); }

 private:
  WindowedFilter<Bandwidth, RoundCount, RoundCount> filter_{kWindowRounds};
};

}  // namespace bbrsim

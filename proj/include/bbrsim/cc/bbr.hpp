#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "bbrsim/cc/bandwidth_filter.hpp"
#include "bbrsim/cc/bbr_common.hpp"
#include "bbrsim/cc/congestion_controller.hpp"
#include "bbrsim/cc/min_rtt_filter.hpp"
#include "bbrsim/sim/rng.hpp"

namespace bbrsim {

enum class BbrVariant { kBbr, kBbrPrime, kBbrPlus, kBbrHsr, kTsunami };
enum class BbrState { kStartup, kDrain, kProbeBw, kProbeRtt };

inline std::string_view VariantName(BbrVariant v) {
  switch (v) {
    case BbrVariant::kBbr: return "bbr";
    case BbrVariant::kBbrPrime: return "bbr_prime";
    case BbrVariant::kBbrPlus: return "bbrplus";
    case BbrVariant::kBbrHsr: return "bbr_hsr";
    case BbrVariant::kTsunami: return "tsunami";
  }
  return "?";
}

inline std::string_view StateName(BbrState s) {
  switch (s) {
    case BbrState::kStartup: return "StartUp";
    case BbrState::kDrain: return "Drain";
    case BbrState::kProbeBw: return "ProbeBW";
    case BbrState::kProbeRtt: return "ProbeRTT";
  }
  return "?";
}

inline const GainTable& GainTableFor(BbrVariant v) {
  static constexpr GainTable kStandard{1.25, 0.75, 1, 1, 1, 1, 1, 1};
  static constexpr GainTable kHsr{1.5, 0.5, 1.5, 0.5, 1.5, 0.5, 1.5, 0.5};
  static constexpr GainTable kTsunami{1.5, 0.75, 1.25, 1.25, 1.25, 1.25, 1.25, 1.25};
  switch (v) {
    case BbrVariant::kBbrHsr: return kHsr;
    case BbrVariant::kTsunami: return kTsunami;
    default: return kStandard;
  }
}

// ProbeBW pacing-gain policy for one flow.
//
// Slot-based variants (bbr, bbr_hsr, tsunami) stay one RTT_min in each slot
// of their table; a slot with gain < 1 also ends once inflight <= BDP.
// bbr_prime leaves a gain < 1 slot only on inflight <= BDP.
// bbrplus has no table walk: it follows UpdateGainCyclePhase with a random
// cycle length of 2..8 RTT_min.
class GainCycle {
 public:
  static constexpr int kCycleLen = 8;
  static constexpr int kCycleRand = 7;

  GainCycle(BbrVariant variant, RngStream rng) : variant_(variant), rng_(std::move(rng)) {}

  // Entry into ProbeBW.
  void Enter(SimTime now) {
    stamp_ = now;
    if (variant_ == BbrVariant::kBbrPlus) {
      cycle_len_ = DrawCycleLen();
      gain_ = 1.0;
      return;
    }
    // Uniform over slots {0, 2, ..., 7}: anything but the first probe-down.
    const int k = static_cast<int>(rng_.NextU64() % 7);
    offset_ = k == 0 ? 0 : k + 1;
    gain_ = GainTableFor(variant_)[offset_];
  }

  double Advance(SimTime now, ByteCount inflight, ByteCount bdp, Duration rtt_min, bool has_loss) {
    if (variant_ == BbrVariant::kBbrPlus) return AdvancePlus(now, inflight, bdp, rtt_min, has_loss);
    const Duration elapsed = now - stamp_;
    const bool timer = elapsed > rtt_min;
    const bool drained = gain_ < 1.0 && inflight <= bdp;
    if (!timer && !drained) return gain_;
    offset_ = (offset_ + 1) % kCycleLen;
    stamp_ = now;
    const double next = GainTableFor(variant_)[offset_];
    // BBR' keeps probing down past the slot timer until inflight reaches the
    // BDP; the slot clock keeps running underneath.
    if (variant_ == BbrVariant::kBbrPrime && gain_ < 1.0 && !drained && next == 1.0) {
      return gain_;
    }
    gain_ = next;
    return gain_;
  }

  int DrawCycleLen() { return kCycleLen - static_cast<int>(rng_.NextU64() % kCycleRand); }

  // Direct state control, for tests.
  void SetSlot(int offset, SimTime stamp) {
    if (offset < 0 || offset >= kCycleLen) throw std::out_of_range("GainCycle: slot");
    offset_ = offset;
    stamp_ = stamp;
    gain_ = GainTableFor(variant_)[offset_];
  }
  void SetPlusState(double gain, int cycle_len, SimTime stamp) {
    gain_ = gain;
    cycle_len_ = cycle_len;
    stamp_ = stamp;
  }

  BbrVariant variant() const { return variant_; }
  double gain() const { return gain_; }
  int offset() const { return offset_; }
  int cycle_len() const { return cycle_len_; }
  SimTime stamp() const { return stamp_; }

 private:
  double AdvancePlus(SimTime now, ByteCount inflight, ByteCount bdp, Duration rtt_min,
                     bool has_loss) {
    const Duration elapsed = now - stamp_;
    if (elapsed > rtt_min * static_cast<int64_t>(cycle_len_)) {
      stamp_ = now;
      cycle_len_ = DrawCycleLen();
      gain_ = 1.25;
      return gain_;
    }
    if (gain_ == 1.0) return gain_;
    if (gain_ < 1.0 && inflight <= bdp) {
      gain_ = 1.0;
    } else if (gain_ > 1.0 && elapsed > rtt_min &&
               (static_cast<double>(inflight) > 1.25 * static_cast<double>(bdp) || has_loss)) {
      gain_ = 0.75;
    }
    return gain_;
  }

  BbrVariant variant_;
  RngStream rng_;
  int offset_ = 0;
  int cycle_len_ = kCycleLen;
  double gain_ = 1.0;
  SimTime stamp_;
};

struct BbrOptions {
  BbrVariant variant = BbrVariant::kBbr;
  uint64_t seed = 1;
  uint32_t flow_index = 0;
  // RTT_min + lambda * stddev(RTT); honored by bbr_hsr only.
  bool rtprop_compensation = false;
  double lambda = 1.0;
};

// BBR v1 and its ProbeBW variants.
class BbrSender final : public CongestionController {
 public:
  static constexpr size_t kMaxRttHistory = 1000;

  explicit BbrSender(BbrOptions options = {})
      : options_(options),
        cycle_(options.variant,
               RngStream(options.seed, FlowStream(StreamId::kGainCycle, options.flow_index))) {}

  std::string_view name() const override { return VariantName(options_.variant); }

  void OnPacketSent(SimTime, PacketNumber, ByteCount, ByteCount) override {}

  void OnCongestionEvent(const CongestionEvent& ev) override {
    lost_in_round_ += ev.bytes_lost();
    bool expired = false;
    for (const RateSample& s : ev.samples) {
      bw_filter_.Update(s, ev.round);
      expired |= min_rtt_.Update(s.rtt_sample, ev.now).expired;
      RecordRtt(s.rtt_sample, ev.now);
    }
    if (expired && state_ != BbrState::kProbeRtt) EnterProbeRtt();

    const ByteCount inflight = ev.bytes_in_flight;
    if (state_ == BbrState::kStartup && ev.is_round_end && bw_filter_.has_sample() &&
        full_bw_.OnRound(bandwidth())) {
      state_ = BbrState::kDrain;
      pacing_gain_ = kDrainPacingGain;
    }
    if (state_ == BbrState::kDrain && inflight <= Bdp()) EnterProbeBw(ev.now);
    if (state_ == BbrState::kProbeBw) {
      pacing_gain_ = cycle_.Advance(ev.now, inflight, Bdp(), RtProp(), lost_in_round_ > 0);
    }
    if (state_ == BbrState::kProbeRtt) HandleProbeRtt(ev.now, inflight);

    UpdateCwnd(ev.bytes_acked());
    if (ev.is_round_end) lost_in_round_ = 0;
  }

  void OnRetransmissionTimeout(SimTime) override { cwnd_ = kBbrMinCwnd; }

  ByteCount GetCongestionWindow() const override {
    return state_ == BbrState::kProbeRtt ? kBbrMinCwnd : cwnd_;
  }

  std::optional<Bandwidth> GetPacingRate() const override {
    if (!bw_filter_.has_sample()) return kBbrInitialPacingRate;
    return bandwidth() * pacing_gain_;
  }

  BbrState state() const { return state_; }
  double pacing_gain() const { return pacing_gain_; }
  double cwnd_gain() const { return kCwndGain; }
  Bandwidth bandwidth() const { return bw_filter_.best(); }
  Duration min_rtt() const { return min_rtt_.min_rtt(); }
  const MinRttFilter& min_rtt_filter() const { return min_rtt_; }
  const FullBandwidthDetector& full_bandwidth() const { return full_bw_; }
  const GainCycle& cycle() const { return cycle_; }
  std::optional<SimTime> probe_rtt_done_at() const { return probe_rtt_done_at_; }
  uint64_t probe_rtt_count() const { return probe_rtt_count_; }

  // RTT_min, or the compensated RTprop when enabled on bbr_hsr.
  Duration RtProp() const {
    if (options_.variant == BbrVariant::kBbrHsr && options_.rtprop_compensation) {
      std::vector<Duration> rtts;
      rtts.reserve(rtt_history_.size());
      for (const auto& [_, r] : rtt_history_) rtts.push_back(r);
      return RtpropCompensation(min_rtt_.min_rtt(), rtts, options_.lambda);
    }
    return min_rtt_.min_rtt();
  }

  ByteCount Bdp() const {
    if (!bw_filter_.has_sample()) return kBbrInitialCwnd;
    return BdpBytes(bandwidth(), RtProp());
  }

 private:
  void RecordRtt(Duration rtt, SimTime now) {
    if (!options_.rtprop_compensation) return;
    rtt_history_.emplace_back(now, rtt);
    while (!rtt_history_.empty() &&
           (rtt_history_.size() > kMaxRttHistory ||
            now - rtt_history_.front().first > MinRttFilter::kExpiry)) {
      rtt_history_.pop_front();
    }
  }

  void EnterProbeBw(SimTime now) {
    state_ = BbrState::kProbeBw;
    cycle_.Enter(now);
    pacing_gain_ = cycle_.gain();
  }

  void EnterProbeRtt() {
    state_ = BbrState::kProbeRtt;
    pacing_gain_ = 1.0;
    probe_rtt_done_at_.reset();
    ++probe_rtt_count_;
  }

  void HandleProbeRtt(SimTime now, ByteCount inflight) {
    if (!probe_rtt_done_at_) {
      if (inflight <= kBbrMinCwnd) probe_rtt_done_at_ = now + kProbeRttHold;
      return;
    }
    if (now < *probe_rtt_done_at_) return;
    min_rtt_.Refresh(now);
    probe_rtt_done_at_.reset();
    if (full_bw_.reached()) {
      EnterProbeBw(now);
    } else {
      state_ = BbrState::kStartup;
      pacing_gain_ = kStartupPacingGain;
    }
  }

  void UpdateCwnd(ByteCount acked) {
    total_acked_ += acked;
    if (!bw_filter_.has_sample()) {
      cwnd_ += acked;
      return;
    }
    const ByteCount target =
        std::max(static_cast<ByteCount>(kCwndGain * static_cast<double>(Bdp())), kBbrMinCwnd);
    if (full_bw_.reached()) {
      cwnd_ = std::min(target, cwnd_ + acked);
    } else if (cwnd_ < target || total_acked_ < kBbrInitialCwnd) {
      cwnd_ += acked;
    }
    cwnd_ = std::max(cwnd_, kBbrMinCwnd);
  }

  BbrOptions options_;
  GainCycle cycle_;
  BandwidthFilter bw_filter_;
  MinRttFilter min_rtt_;
  FullBandwidthDetector full_bw_;
  std::deque<std::pair<SimTime, Duration>> rtt_history_;

  BbrState state_ = BbrState::kStartup;
  double pacing_gain_ = kStartupPacingGain;
  ByteCount cwnd_ = kBbrInitialCwnd;
  ByteCount total_acked_ = 0;
  ByteCount lost_in_round_ = 0;
  std::optional<SimTime> probe_rtt_done_at_;
  uint64_t probe_rtt_count_ = 0;
};

}  // namespace bbrsim

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "bbrsim/cc/bandwidth_filter.hpp"
#include "bbrsim/cc/bbr_common.hpp"
#include "bbrsim/cc/congestion_controller.hpp"
#include "bbrsim/cc/min_rtt_filter.hpp"
#include "bbrsim/sim/rng.hpp"

namespace bbrsim {

inline constexpr double kBbr2LossThreshold = 0.02;
inline constexpr double kBbr2Beta = 0.3;
inline constexpr double kBbr2HeadRoom = 0.15;
inline constexpr uint64_t kBbr2StartupLossPackets = 8;
inline constexpr double kBbr2ProbeUpGain = 1.25;
inline constexpr double kBbr2ProbeDownGain = 0.75;
inline constexpr Duration kBbr2CruiseMin = Duration::Seconds(2);
inline constexpr Duration kBbr2CruiseMax = Duration::Seconds(3);

enum class Bbr2State { kStartup, kDrain, kProbeBw, kProbeRtt };
enum class Bbr2Phase { kDown, kCruise, kRefill, kUp };

inline std::string_view PhaseName(Bbr2Phase p) {
  switch (p) {
    case Bbr2Phase::kDown: return "Down";
    case Bbr2Phase::kCruise: return "Cruise";
    case Bbr2Phase::kRefill: return "Refill";
    case Bbr2Phase::kUp: return "Up";
  }
  return "?";
}

inline bool Bbr2StartupLossExit(uint64_t lost_in_round, double loss_rate_in_round) {
  return lost_in_round > kBbr2StartupLossPackets && loss_rate_in_round > kBbr2LossThreshold;
}

inline bool IsInflightTooHigh(uint64_t lost_in_round, uint64_t sent_in_round) {
  const double denom = static_cast<double>(std::max<uint64_t>(1, sent_in_round));
  return static_cast<double>(lost_in_round) / denom > kBbr2LossThreshold;
}

// inflight_lo = max(delta_delivered, inflight_lo * (1 - kBeta)); an unset
// bound starts from the current cwnd.
inline ByteCount UpdateInflightLo(std::optional<ByteCount> lo, ByteCount delta_delivered,
                                  ByteCount cwnd) {
  const double base = static_cast<double>(lo.value_or(cwnd));
  return std::max(delta_delivered, static_cast<ByteCount>(base * (1.0 - kBbr2Beta)));
}

// min(inflight_lo, inflight_hi * (1 - kHeadRoom)); unset lo is +inf.
inline ByteCount CruiseCwnd(std::optional<ByteCount> lo, ByteCount hi) {
  const auto headroom = static_cast<ByteCount>(static_cast<double>(hi) * (1.0 - kBbr2HeadRoom));
  return lo ? std::min(*lo, headroom) : headroom;
}

struct ProbeUpState {
  ByteCount acked = 0;
  ByteCount bytes = kMaxSegmentSize;
  int rounds = 0;
};

// ProbeInflightHighUpward. Returns the increase applied to inflight_hi.
inline ByteCount ProbeInflightHighUpward(ProbeUpState& s, ByteCount& inflight_hi,
                                         ByteCount bytes_acked, bool is_round_end,
                                         ByteCount cwnd) {
  ByteCount added = 0;
  s.acked += bytes_acked;
  if (s.acked >= s.bytes) {
    const ByteCount delta = s.acked / s.bytes;
    s.acked -= delta * s.bytes;
    added = delta * kMaxSegmentSize;
    inflight_hi += added;
  }
  if (is_round_end) {
    const ByteCount growth = ByteCount{1} << s.rounds;
    s.rounds = std::min(30, s.rounds + 1);
    s.bytes = std::max<ByteCount>(kMaxSegmentSize, cwnd / growth);
  }
  return added;
}

struct Bbr2Options {
  uint64_t seed = 1;
  uint32_t flow_index = 0;
};

class Bbr2Sender final : public CongestionController {
 public:
  explicit Bbr2Sender(Bbr2Options options = {})
      : cruise_rng_(options.seed, FlowStream(StreamId::kCruiseInterval, options.flow_index)) {}

  std::string_view name() const override { return "bbr2"; }

  void OnPacketSent(SimTime, PacketNumber, ByteCount, ByteCount bytes_in_flight) override {
    ++sent_in_round_;
    max_inflight_in_round_ = std::max(max_inflight_in_round_, bytes_in_flight);
  }

  void OnCongestionEvent(const CongestionEvent& ev) override {
    lost_in_round_ += ev.lost.size();
    delivered_in_round_ += ev.bytes_acked();
    bool expired = false;
    for (const RateSample& s : ev.samples) {
      bw_filter_.Update(s, ev.round);
      expired |= min_rtt_.Update(s.rtt_sample, ev.now).expired;
    }
    if (expired && state_ != Bbr2State::kProbeRtt) EnterProbeRtt();

    const ByteCount inflight = ev.bytes_in_flight;
    if (ev.is_round_end) OnRoundEnd(ev.now);
    if (state_ == Bbr2State::kProbeBw && phase_ == Bbr2Phase::kUp && inflight_hi_) {
      ProbeInflightHighUpward(probe_up_, *inflight_hi_, ev.bytes_acked(), ev.is_round_end, cwnd_);
    }

    if (state_ == Bbr2State::kDrain && inflight <= Bdp()) EnterProbeBw(ev.now);
    if (state_ == Bbr2State::kProbeBw) AdvancePhase(ev.now, inflight);
    if (state_ == Bbr2State::kProbeRtt) HandleProbeRtt(ev.now, inflight);

    UpdateCwnd(ev.bytes_acked());
    if (ev.is_round_end) ResetRoundCounters();
  }

  void OnRetransmissionTimeout(SimTime) override { cwnd_ = kBbrMinCwnd; }

  ByteCount GetCongestionWindow() const override {
    return state_ == Bbr2State::kProbeRtt ? probe_rtt_cwnd_ : cwnd_;
  }

  std::optional<Bandwidth> GetPacingRate() const override {
    if (!bw_filter_.has_sample()) return kBbrInitialPacingRate;
    return bandwidth() * pacing_gain_;
  }

  Bbr2State state() const { return state_; }
  Bbr2Phase phase() const { return phase_; }
  double pacing_gain() const { return pacing_gain_; }
  Bandwidth bandwidth() const { return bw_filter_.best(); }
  Duration min_rtt() const { return min_rtt_.min_rtt(); }
  std::optional<ByteCount> inflight_lo() const { return inflight_lo_; }
  std::optional<ByteCount> inflight_hi() const { return inflight_hi_; }
  SimTime cruise_deadline() const { return cruise_deadline_; }
  const ProbeUpState& probe_up() const { return probe_up_; }
  const FullBandwidthDetector& full_bandwidth() const { return full_bw_; }
  uint64_t probe_rtt_count() const { return probe_rtt_count_; }

  ByteCount Bdp() const {
    if (!bw_filter_.has_sample()) return kBbrInitialCwnd;
    return BdpBytes(bandwidth(), min_rtt_.min_rtt());
  }

 private:
  void OnRoundEnd(SimTime now) {
    const bool too_high = IsInflightTooHigh(lost_in_round_, sent_in_round_);
    if (state_ == Bbr2State::kStartup) {
      const double rate = static_cast<double>(lost_in_round_) /
                          static_cast<double>(std::max<uint64_t>(1, sent_in_round_));
      if (Bbr2StartupLossExit(lost_in_round_, rate)) {
        SetInflightHi(Bdp());
        full_bw_.MarkReached();
        EnterDrain();
      } else if (bw_filter_.has_sample() && full_bw_.OnRound(bandwidth())) {
        EnterDrain();
      }
      return;
    }
    if (state_ != Bbr2State::kProbeBw) return;

    if (lost_in_round_ > 0 && phase_ != Bbr2Phase::kRefill) {
      inflight_lo_ = UpdateInflightLo(inflight_lo_, delivered_in_round_, cwnd_);
    }
    if (too_high) {
      SetInflightHi(inflight_hi_ ? std::min(*inflight_hi_, max_inflight_in_round_)
                                 : max_inflight_in_round_);
      if (phase_ == Bbr2Phase::kUp) {
        EnterPhase(Bbr2Phase::kDown, now);
      } else if (phase_ == Bbr2Phase::kDown) {
        EnterPhase(Bbr2Phase::kCruise, now);
      }
    }
    if (phase_ == Bbr2Phase::kRefill && refill_rounds_++ >= 1) EnterPhase(Bbr2Phase::kUp, now);
  }

  void AdvancePhase(SimTime now, ByteCount inflight) {
    const ByteCount bdp = Bdp();
    switch (phase_) {
      case Bbr2Phase::kDown:
        if (inflight <= bdp) EnterPhase(Bbr2Phase::kCruise, now);
        break;
      case Bbr2Phase::kCruise:
        if (now >= cruise_deadline_) EnterPhase(Bbr2Phase::kRefill, now);
        break;
      case Bbr2Phase::kRefill:
        break;
      case Bbr2Phase::kUp: {
        const bool above = static_cast<double>(inflight) >= kBbr2ProbeUpGain * static_cast<double>(bdp);
        // Without an upper bound there is no loss signal to wait for, so
        // the probe ends after one RTT_min above target.
        const bool timed_out = !inflight_hi_ && now - phase_start_ > min_rtt_.min_rtt();
        if (above && (lost_in_round_ > 0 || timed_out)) EnterPhase(Bbr2Phase::kDown, now);
        break;
      }
    }
  }

  void EnterDrain() {
    state_ = Bbr2State::kDrain;
    pacing_gain_ = kDrainPacingGain;
  }

  void EnterProbeBw(SimTime now) {
    state_ = Bbr2State::kProbeBw;
    EnterPhase(Bbr2Phase::kDown, now);
  }

  void EnterPhase(Bbr2Phase p, SimTime now) {
    phase_ = p;
    phase_start_ = now;
    switch (p) {
      case Bbr2Phase::kDown:
        pacing_gain_ = kBbr2ProbeDownGain;
        break;
      case Bbr2Phase::kCruise:
        pacing_gain_ = 1.0;
        cruise_deadline_ = now + Duration::FromSeconds(cruise_rng_.Uniform(
                                     kBbr2CruiseMin.ToSeconds(), kBbr2CruiseMax.ToSeconds()));
        break;
      case Bbr2Phase::kRefill:
        pacing_gain_ = 1.0;
        inflight_lo_.reset();
        refill_rounds_ = 0;
        break;
      case Bbr2Phase::kUp:
        pacing_gain_ = kBbr2ProbeUpGain;
        probe_up_ = ProbeUpState{0, std::max(kMaxSegmentSize, cwnd_), 0};
        break;
    }
  }

  void EnterProbeRtt() {
    state_ = Bbr2State::kProbeRtt;
    pacing_gain_ = 1.0;
    probe_rtt_cwnd_ = std::max(cwnd_ / 2, kBbrMinCwnd);
    probe_rtt_done_at_.reset();
    ++probe_rtt_count_;
  }

  void HandleProbeRtt(SimTime now, ByteCount inflight) {
    if (!probe_rtt_done_at_) {
      if (inflight <= probe_rtt_cwnd_) probe_rtt_done_at_ = now + kProbeRttHold;
      return;
    }
    if (now < *probe_rtt_done_at_) return;
    min_rtt_.Refresh(now);
    probe_rtt_done_at_.reset();
    cwnd_ = probe_rtt_cwnd_;
    if (full_bw_.reached()) {
      state_ = Bbr2State::kProbeBw;
      EnterPhase(Bbr2Phase::kCruise, now);
    } else {
      state_ = Bbr2State::kStartup;
      pacing_gain_ = kStartupPacingGain;
    }
  }

  void SetInflightHi(ByteCount hi) { inflight_hi_ = std::max(hi, kBbrMinCwnd); }

  void UpdateCwnd(ByteCount acked) {
    total_acked_ += acked;
    if (state_ == Bbr2State::kProbeRtt) return;
    const ByteCount target =
        std::max(static_cast<ByteCount>(kCwndGain * static_cast<double>(Bdp())), kBbrMinCwnd);
    ByteCount cwnd = cwnd_;
    if (!bw_filter_.has_sample()) {
      cwnd += acked;
    } else if (full_bw_.reached()) {
      cwnd = std::min(target, cwnd + acked);
    } else if (cwnd < target || total_acked_ < kBbrInitialCwnd) {
      cwnd += acked;
    }

    if (state_ == Bbr2State::kProbeBw) {
      switch (phase_) {
        case Bbr2Phase::kCruise:
          if (inflight_hi_) {
            cwnd = CruiseCwnd(inflight_lo_, *inflight_hi_);
          } else if (inflight_lo_) {
            cwnd = std::min(cwnd, *inflight_lo_);
          }
          break;
        case Bbr2Phase::kRefill:
          if (inflight_hi_) cwnd = *inflight_hi_;
          break;
        case Bbr2Phase::kUp:
          if (inflight_hi_) cwnd = *inflight_hi_;
          if (inflight_lo_) cwnd = std::min(cwnd, *inflight_lo_);
          break;
        case Bbr2Phase::kDown:
          if (inflight_hi_) cwnd = std::min(cwnd, *inflight_hi_);
          if (inflight_lo_) cwnd = std::min(cwnd, *inflight_lo_);
          break;
      }
    } else if (inflight_hi_) {
      cwnd = std::min(cwnd, *inflight_hi_);
    }
    cwnd_ = std::max(cwnd, kBbrMinCwnd);
  }

  void ResetRoundCounters() {
    lost_in_round_ = 0;
    sent_in_round_ = 0;
    delivered_in_round_ = 0;
    max_inflight_in_round_ = 0;
  }

  RngStream cruise_rng_;
  BandwidthFilter bw_filter_;
  MinRttFilter min_rtt_;
  FullBandwidthDetector full_bw_;

  Bbr2State state_ = Bbr2State::kStartup;
  Bbr2Phase phase_ = Bbr2Phase::kDown;
  SimTime phase_start_;
  double pacing_gain_ = kStartupPacingGain;
  ByteCount cwnd_ = kBbrInitialCwnd;
  ByteCount total_acked_ = 0;

  std::optional<ByteCount> inflight_lo_;
  std::optional<ByteCount> inflight_hi_;
  SimTime cruise_deadline_;
  int refill_rounds_ = 0;
  ProbeUpState probe_up_;

  uint64_t lost_in_round_ = 0;
  uint64_t sent_in_round_ = 0;
  ByteCount delivered_in_round_ = 0;
  ByteCount max_inflight_in_round_ = 0;

  ByteCount probe_rtt_cwnd_ = kBbrMinCwnd;
  std::optional<SimTime> probe_rtt_done_at_;
  uint64_t probe_rtt_count_ = 0;
};

}  // namespace bbrsim

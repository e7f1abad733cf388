#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>

#include "bbrsim/cc/congestion_controller.hpp"
#include "bbrsim/cc/reno.hpp"
#include "bbrsim/net/packet.hpp"

namespace bbrsim {

// Cubic window state. Windows in bytes; the cubic curve itself works in MSS
// units: W(t) = C (t - K)^3 + w_max.
struct CubicState {
  static constexpr double kC = 0.4;
  static constexpr double kBeta = 0.7;

  double cwnd_bytes = 10.0 * kMaxSegmentSize;
  double ssthresh_bytes = std::numeric_limits<double>::infinity();
  double w_max_bytes = 0.0;
  std::optional<SimTime> epoch_start;
  double k_seconds = 0.0;
  // Window at epoch start; origin of the Reno-friendly estimate.
  double w_est_origin_bytes = 0.0;
};

inline double CubicK(double w_max_mss, double beta = CubicState::kBeta, double c = CubicState::kC) {
  return std::cbrt(w_max_mss * (1.0 - beta) / c);
}

// Target window (bytes) `t_since_epoch` into the epoch: the cubic curve,
// floored by the Reno-friendly estimate
//   W_est(t) = origin + 3 (1 - beta) / (1 + beta) * t / rtt   [MSS].
inline double CubicWindow(const CubicState& s, Duration t_since_epoch, Duration rtt) {
  const double mss = static_cast<double>(kMaxSegmentSize);
  const double t = t_since_epoch.ToSeconds();
  const double dt = t - s.k_seconds;
  const double cubic = CubicState::kC * dt * dt * dt * mss + s.w_max_bytes;
  double friendly = 0.0;
  if (rtt > Duration::Zero()) {
    const double alpha = 3.0 * (1.0 - CubicState::kBeta) / (1.0 + CubicState::kBeta);
    friendly = s.w_est_origin_bytes + alpha * (t / rtt.ToSeconds()) * mss;
  }
  return std::max(cubic, friendly);
}

inline void CubicOnLoss(CubicState& s) {
  const double floor = 2.0 * kMaxSegmentSize;
  s.w_max_bytes = s.cwnd_bytes;
  s.cwnd_bytes = std::max(CubicState::kBeta * s.cwnd_bytes, floor);
  s.ssthresh_bytes = s.cwnd_bytes;
  s.k_seconds = CubicK(s.w_max_bytes / static_cast<double>(kMaxSegmentSize));
  s.epoch_start.reset();
}

inline void CubicOnAck(CubicState& s, ByteCount acked_bytes, SimTime now, Duration min_rtt) {
  const double acked = static_cast<double>(acked_bytes);
  if (s.cwnd_bytes < s.ssthresh_bytes) {
    s.cwnd_bytes += acked;
    return;
  }
  const double mss = static_cast<double>(kMaxSegmentSize);
  if (!s.epoch_start) {
    s.epoch_start = now;
    if (s.cwnd_bytes < s.w_max_bytes) {
      s.k_seconds = std::cbrt((s.w_max_bytes - s.cwnd_bytes) / mss / CubicState::kC);
    } else {
      s.k_seconds = 0.0;
      s.w_max_bytes = s.cwnd_bytes;
    }
    s.w_est_origin_bytes = s.cwnd_bytes;
  }
  const Duration rtt = min_rtt > Duration::Zero() ? min_rtt : Duration::Millis(100);
  const double target = CubicWindow(s, (now - *s.epoch_start) + rtt, rtt);
  if (target > s.cwnd_bytes) {
    s.cwnd_bytes += (target - s.cwnd_bytes) / s.cwnd_bytes * acked;
  } else {
    s.cwnd_bytes += mss / (100.0 * s.cwnd_bytes) * acked;
  }
}

class CubicSender final : public CongestionController {
 public:
  std::string_view name() const override { return "cubic"; }

  void OnPacketSent(SimTime, PacketNumber pn, ByteCount, ByteCount) override {
    recovery_.OnPacketSent(pn);
  }

  void OnCongestionEvent(const CongestionEvent& ev) override {
    PacketNumber largest_lost = 0;
    for (const auto& l : ev.lost) largest_lost = std::max(largest_lost, l.packet_number);
    if (!ev.lost.empty() && recovery_.OnLoss(largest_lost)) CubicOnLoss(state_);
    for (const auto& a : ev.acked) {
      if (!recovery_.InRecovery(a.packet_number)) CubicOnAck(state_, a.bytes, ev.now, ev.min_rtt);
    }
  }

  void OnRetransmissionTimeout(SimTime) override {
    recovery_.ForceReduction();
    state_.cwnd_bytes = kMaxSegmentSize;
    state_.epoch_start.reset();
  }

  ByteCount GetCongestionWindow() const override {
    return static_cast<ByteCount>(state_.cwnd_bytes);
  }
  std::optional<Bandwidth> GetPacingRate() const override { return std::nullopt; }

  const CubicState& state() const { return state_; }

 private:
  CubicState state_;
  RecoveryTracker recovery_;
};

}  // namespace bbrsim

#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string_view>

#include "bbrsim/cc/congestion_controller.hpp"
#include "bbrsim/net/packet.hpp"

namespace bbrsim {

// AIMD with alpha = 1 MSS per RTT and beta = 0.5. Window in bytes; kept
// fractional so per-ack increments of MSS*MSS/cwnd do not truncate.
struct RenoState {
  static constexpr double kBeta = 0.5;

  double cwnd_bytes = 10.0 * kMaxSegmentSize;
  double ssthresh_bytes = std::numeric_limits<double>::infinity();
  bool in_recovery = false;
};

inline double RenoOnAck(RenoState& s, ByteCount acked_bytes) {
  const double mss = static_cast<double>(kMaxSegmentSize);
  if (s.cwnd_bytes < s.ssthresh_bytes) {
    s.cwnd_bytes += static_cast<double>(acked_bytes);
  } else {
    s.cwnd_bytes += mss * mss / s.cwnd_bytes * (static_cast<double>(acked_bytes) / mss);
  }
  return s.cwnd_bytes;
}

inline double RenoOnLoss(RenoState& s) {
  const double floor = 2.0 * kMaxSegmentSize;
  s.ssthresh_bytes = std::max(RenoState::kBeta * s.cwnd_bytes, floor);
  s.cwnd_bytes = s.ssthresh_bytes;
  return s.cwnd_bytes;
}

// Recovery bookkeeping shared by the loss-based senders: one reduction per
// round trip, i.e. losses of packets sent before the last reduction are
// ignored, and acks for those packets do not grow the window.
class RecoveryTracker {
 public:
  void OnPacketSent(PacketNumber pn) { largest_sent_ = pn; }

  // True if this loss should trigger a window reduction.
  bool OnLoss(PacketNumber lost_pn) {
    if (lost_pn <= end_of_recovery_) return false;
    end_of_recovery_ = largest_sent_;
    return true;
  }

  void ForceReduction() { end_of_recovery_ = largest_sent_; }

  bool InRecovery(PacketNumber acked_pn) const { return acked_pn <= end_of_recovery_; }

 private:
  PacketNumber largest_sent_ = 0;
  PacketNumber end_of_recovery_ = 0;
};

class RenoSender final : public CongestionController {
 public:
  std::string_view name() const override { return "reno"; }

  void OnPacketSent(SimTime, PacketNumber pn, ByteCount, ByteCount) override {
    recovery_.OnPacketSent(pn);
  }

  void OnCongestionEvent(const CongestionEvent& ev) override {
    PacketNumber largest_lost = 0;
    for (const auto& l : ev.lost) largest_lost = std::max(largest_lost, l.packet_number);
    if (!ev.lost.empty() && recovery_.OnLoss(largest_lost)) RenoOnLoss(state_);
    for (const auto& a : ev.acked) {
      state_.in_recovery = recovery_.InRecovery(a.packet_number);
      if (!state_.in_recovery) RenoOnAck(state_, a.bytes);
    }
  }

  void OnRetransmissionTimeout(SimTime) override {
    recovery_.ForceReduction();
    state_.cwnd_bytes = kMaxSegmentSize;
  }

  ByteCount GetCongestionWindow() const override {
    return static_cast<ByteCount>(state_.cwnd_bytes);
  }
  std::optional<Bandwidth> GetPacingRate() const override { return std::nullopt; }

  const RenoState& state() const { return state_; }

 private:
  RenoState state_;
  RecoveryTracker recovery_;
};

}  // namespace bbrsim

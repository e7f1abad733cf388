#include <gtest/gtest.h>

#include <cmath>

#include "bbrsim/cc/cubic.hpp"
#include "bbrsim/cc/reno.hpp"

namespace bbrsim {
namespace {

constexpr double kMss = static_cast<double>(kMaxSegmentSize);

CongestionEvent Acks(SimTime now, PacketNumber first, PacketNumber last, Duration min_rtt = Duration::Millis(100)) {
  CongestionEvent ev;
  ev.now = now;
  ev.min_rtt = min_rtt;
  for (PacketNumber pn = first; pn <= last; ++pn) ev.acked.push_back({pn, kMaxSegmentSize, SimTime::Zero()});
  return ev;
}

CongestionEvent Loss(SimTime now, PacketNumber pn) {
  CongestionEvent ev;
  ev.now = now;
  ev.lost.push_back({pn, kMaxSegmentSize});
  return ev;
}

TEST(Reno, SlowStartAddsAckedBytes) {
  RenoState s;
  RenoOnAck(s, kMaxSegmentSize);
  EXPECT_DOUBLE_EQ(s.cwnd_bytes, 11 * kMss);
}

TEST(Reno, CongestionAvoidanceIncrement) {
  RenoState s;
  s.ssthresh_bytes = 5 * kMss;
  RenoOnAck(s, kMaxSegmentSize);
  EXPECT_DOUBLE_EQ(s.cwnd_bytes, 10 * kMss + kMss / 10);
}

TEST(Reno, OneMssPerRound) {
  RenoState s;
  s.cwnd_bytes = 40 * kMss;
  s.ssthresh_bytes = 0;
  for (int i = 0; i < 40; ++i) RenoOnAck(s, kMaxSegmentSize);
  EXPECT_NEAR(s.cwnd_bytes, 41 * kMss, 0.05 * kMss);
}

TEST(Reno, HalvesWithFloor) {
  RenoState s;
  s.cwnd_bytes = 20 * kMss;
  RenoOnLoss(s);
  EXPECT_DOUBLE_EQ(s.cwnd_bytes, 10 * kMss);
  EXPECT_DOUBLE_EQ(s.ssthresh_bytes, 10 * kMss);
  s.cwnd_bytes = 3 * kMss;
  RenoOnLoss(s);
  EXPECT_DOUBLE_EQ(s.cwnd_bytes, 2 * kMss);
}

TEST(RenoSender, OneReductionPerRound) {
  RenoSender r;
  for (PacketNumber pn = 1; pn <= 30; ++pn) r.OnPacketSent(SimTime::Zero(), pn, kMaxSegmentSize, 0);
  r.OnCongestionEvent(Acks(SimTime::Millis(100), 1, 10));
  const ByteCount before = r.GetCongestionWindow();
  r.OnCongestionEvent(Loss(SimTime::Millis(110), 11));
  r.OnCongestionEvent(Loss(SimTime::Millis(120), 12));
  EXPECT_EQ(r.GetCongestionWindow(), before / 2);
  // Acks for packets sent before the reduction do not grow the window.
  r.OnCongestionEvent(Acks(SimTime::Millis(130), 13, 30));
  EXPECT_EQ(r.GetCongestionWindow(), before / 2);
  // A loss of a packet sent after the reduction counts again.
  r.OnPacketSent(SimTime::Millis(130), 31, kMaxSegmentSize, 0);
  r.OnCongestionEvent(Loss(SimTime::Millis(250), 31));
  EXPECT_EQ(r.GetCongestionWindow(), before / 4);
  EXPECT_FALSE(r.GetPacingRate());
}

TEST(Cubic, KClosedForm) {
  EXPECT_NEAR(CubicK(100), std::cbrt(30.0 / 0.4), 1e-12);
  EXPECT_NEAR(CubicK(100), 4.217, 1e-3);
}

TEST(Cubic, WindowCurve) {
  CubicState s;
  s.w_max_bytes = 100 * kMss;
  s.k_seconds = CubicK(100);
  s.w_est_origin_bytes = 0;
  const Duration rtt = Duration::Millis(100);
  // W(0) = w_max - C K^3 = beta * w_max; W(K) = w_max.
  EXPECT_NEAR(CubicWindow(s, Duration::Zero(), rtt), 70 * kMss, 1e-6);
  EXPECT_NEAR(CubicWindow(s, Duration::FromSeconds(s.k_seconds), rtt), 100 * kMss, 0.01 * kMss);
  // Continuity around K.
  const double a = CubicWindow(s, Duration::FromSeconds(s.k_seconds - 0.001), rtt);
  const double b = CubicWindow(s, Duration::FromSeconds(s.k_seconds + 0.001), rtt);
  EXPECT_NEAR(a, b, 0.001 * kMss);
}

TEST(Cubic, RenoFriendlyFloor) {
  CubicState s;
  s.w_max_bytes = 10 * kMss;
  s.k_seconds = CubicK(10);
  s.w_est_origin_bytes = 7 * kMss;
  // Short RTT: after 2 s the friendly estimate 7 + 0.529*20 MSS beats the curve.
  const double alpha = 3.0 * 0.3 / 1.7;
  const double curve = 0.4 * std::pow(2.0 - s.k_seconds, 3) * kMss + 10 * kMss;
  const double friendly = 7 * kMss + alpha * 20 * kMss;
  EXPECT_NEAR(CubicWindow(s, Duration::Seconds(2), Duration::Millis(100)), std::max(curve, friendly), 1e-6);
}

TEST(Cubic, BetaReduction) {
  CubicState s;
  s.cwnd_bytes = 100 * kMss;
  s.ssthresh_bytes = 0;
  CubicOnLoss(s);
  EXPECT_DOUBLE_EQ(s.cwnd_bytes, 70 * kMss);
  EXPECT_DOUBLE_EQ(s.w_max_bytes, 100 * kMss);
  EXPECT_NEAR(s.k_seconds, CubicK(100), 1e-12);
}

TEST(Cubic, GrowsBackTowardWmaxAroundK) {
  CubicState s;
  s.cwnd_bytes = 100 * kMss;
  CubicOnLoss(s);
  const Duration rtt = Duration::Millis(100);
  SimTime t = SimTime::Seconds(1);
  // One ack per MSS of window per RTT for K seconds.
  const double k = s.k_seconds;
  while ((t - SimTime::Seconds(1)).ToSeconds() < k) {
    const int acks = static_cast<int>(s.cwnd_bytes / kMss);
    for (int i = 0; i < acks; ++i) CubicOnAck(s, kMaxSegmentSize, t, rtt);
    t = t + rtt;
  }
  EXPECT_NEAR(s.cwnd_bytes, 100 * kMss, 5 * kMss);
}

TEST(CubicSender, ReducesOncePerRound) {
  CubicSender c;
  for (PacketNumber pn = 1; pn <= 20; ++pn) c.OnPacketSent(SimTime::Zero(), pn, kMaxSegmentSize, 0);
  const ByteCount w = c.GetCongestionWindow();
  c.OnCongestionEvent(Loss(SimTime::Millis(10), 3));
  c.OnCongestionEvent(Loss(SimTime::Millis(11), 4));
  EXPECT_NEAR(static_cast<double>(c.GetCongestionWindow()), 0.7 * static_cast<double>(w), 1.0);
  c.OnRetransmissionTimeout(SimTime::Seconds(1));
  EXPECT_EQ(c.GetCongestionWindow(), kMaxSegmentSize);
}

}  // namespace
}  // namespace bbrsim

#include <gtest/gtest.h>

#include "bbrsim/cc/bbr2.hpp"

namespace bbrsim {
namespace {

constexpr double kLinkRate = 625000.0;

CongestionEvent Round(SimTime now, RoundCount round, ByteCount inflight, size_t lost = 0,
                      Duration rtt = Duration::Millis(100)) {
  CongestionEvent ev;
  ev.now = now;
  ev.round = round;
  ev.is_round_end = true;
  ev.bytes_in_flight = inflight;
  ev.acked.push_back({round, kMaxSegmentSize, SimTime::Zero()});
  for (size_t i = 0; i < lost; ++i) ev.lost.push_back({1000 + i, kMaxSegmentSize});
  RateSample s;
  s.bw_es = Bandwidth::BytesPerSecond(kLinkRate);
  s.rtt_sample = rtt;
  ev.samples.push_back(s);
  return ev;
}

void SendPackets(Bbr2Sender& s, int n) {
  for (int i = 0; i < n; ++i) s.OnPacketSent(SimTime::Zero(), static_cast<PacketNumber>(i), kMaxSegmentSize, 0);
}

TEST(Bbr2Rules, StartupLossExit) {
  EXPECT_TRUE(Bbr2StartupLossExit(9, 0.03));
  EXPECT_FALSE(Bbr2StartupLossExit(8, 0.5)) << "needs more than 8 losses";
  EXPECT_FALSE(Bbr2StartupLossExit(20, 0.01)) << "needs loss rate above 2%";
}

TEST(Bbr2Rules, InflightTooHigh) {
  EXPECT_TRUE(IsInflightTooHigh(3, 100));
  EXPECT_FALSE(IsInflightTooHigh(1, 100));
  EXPECT_FALSE(IsInflightTooHigh(2, 100)) << "exactly 2% is not above the threshold";
  EXPECT_FALSE(IsInflightTooHigh(0, 0));
}

TEST(Bbr2Rules, InflightLo) {
  EXPECT_EQ(UpdateInflightLo(10000, 5000, 0), 7000u);
  EXPECT_EQ(UpdateInflightLo(10000, 9000, 0), 9000u);
  EXPECT_EQ(UpdateInflightLo(std::nullopt, 5000, 20000), 14000u) << "unset starts from cwnd";
}

TEST(Bbr2Rules, CruiseCwnd) {
  EXPECT_EQ(CruiseCwnd(std::nullopt, 10000), 8500u);
  EXPECT_EQ(CruiseCwnd(9000, 10000), 8500u);
  EXPECT_EQ(CruiseCwnd(8000, 10000), 8000u);
}

TEST(Bbr2Rules, ProbeUpAccumulatesWholeMultiples) {
  ProbeUpState s{3000, 2000, 0};
  ByteCount hi = 50000;
  EXPECT_EQ(ProbeInflightHighUpward(s, hi, 2000, false, 0), 2 * kMaxSegmentSize);
  EXPECT_EQ(s.acked, 1000u);
  EXPECT_EQ(hi, 50000 + 2 * kMaxSegmentSize);
}

TEST(Bbr2Rules, ProbeUpRoundEndDoublesGrowth) {
  ProbeUpState s{0, 2000, 0};
  ByteCount hi = 50000;
  ProbeInflightHighUpward(s, hi, 0, true, 70000);
  EXPECT_EQ(s.bytes, 70000u);
  EXPECT_EQ(s.rounds, 1);
  ProbeInflightHighUpward(s, hi, 0, true, 70000);
  EXPECT_EQ(s.bytes, 35000u);
  EXPECT_EQ(s.rounds, 2);
}

TEST(Bbr2Rules, ProbeUpRoundsCapped) {
  ProbeUpState s{0, 2000, 30};
  ByteCount hi = 50000;
  ProbeInflightHighUpward(s, hi, 0, true, 70000);
  EXPECT_EQ(s.rounds, 30);
  EXPECT_EQ(s.bytes, kMaxSegmentSize);
}

TEST(Bbr2Sender, StartupExitsOnHeavyLossAndSetsInflightHi) {
  Bbr2Sender s;
  SendPackets(s, 300);
  s.OnCongestionEvent(Round(SimTime::Millis(100), 1, 100000, 9));
  EXPECT_EQ(s.state(), Bbr2State::kDrain);
  ASSERT_TRUE(s.inflight_hi());
  EXPECT_EQ(*s.inflight_hi(), 62500u);
}

TEST(Bbr2Sender, LightLossKeepsStartup) {
  Bbr2Sender s;
  SendPackets(s, 2000);
  s.OnCongestionEvent(Round(SimTime::Millis(100), 1, 100000, 20));
  EXPECT_EQ(s.state(), Bbr2State::kStartup);
  EXPECT_FALSE(s.inflight_hi());
}

TEST(Bbr2Sender, FlatBandwidthExitLeavesInflightHiUnset) {
  Bbr2Sender s;
  for (RoundCount r = 1; r <= 4; ++r) s.OnCongestionEvent(Round(SimTime::Millis(100 * r), r, 100000));
  EXPECT_EQ(s.state(), Bbr2State::kDrain);
  EXPECT_FALSE(s.inflight_hi());
}

TEST(Bbr2Sender, DownToCruiseWithSeededDeadline) {
  constexpr uint64_t kSeed = 7;
  Bbr2Sender s(Bbr2Options{kSeed, 1});
  SendPackets(s, 300);
  s.OnCongestionEvent(Round(SimTime::Millis(100), 1, 100000, 9));
  ASSERT_EQ(s.state(), Bbr2State::kDrain);
  const SimTime t = SimTime::Seconds(10);
  s.OnCongestionEvent(Round(t, 2, 60000));
  EXPECT_EQ(s.state(), Bbr2State::kProbeBw);
  EXPECT_EQ(s.phase(), Bbr2Phase::kCruise);
  RngStream oracle(kSeed, FlowStream(StreamId::kCruiseInterval, 1));
  const Duration draw = Duration::FromSeconds(oracle.Uniform(2.0, 3.0));
  EXPECT_EQ(s.cruise_deadline(), t + draw);
  EXPECT_GE(draw, Duration::Seconds(2));
  EXPECT_LT(draw, Duration::Seconds(3));
  // Cruise window is bounded by inflight_hi with headroom.
  EXPECT_EQ(s.GetCongestionWindow(), CruiseCwnd(std::nullopt, 62500));
}

TEST(Bbr2Sender, CruiseRefillUpThenDownOnLoss) {
  Bbr2Sender s(Bbr2Options{7, 1});
  SendPackets(s, 300);
  RoundCount r = 1;
  s.OnCongestionEvent(Round(SimTime::Millis(100), r++, 100000, 9));
  SimTime t = SimTime::Seconds(1);
  s.OnCongestionEvent(Round(t, r++, 60000));
  ASSERT_EQ(s.phase(), Bbr2Phase::kCruise);
  t = s.cruise_deadline();
  s.OnCongestionEvent(Round(t, r++, 60000));
  EXPECT_EQ(s.phase(), Bbr2Phase::kRefill);
  EXPECT_FALSE(s.inflight_lo());
  EXPECT_EQ(s.GetCongestionWindow(), *s.inflight_hi());
  // One full round of refill, then Up.
  for (int i = 0; i < 2 && s.phase() == Bbr2Phase::kRefill; ++i) {
    t = t + Duration::Millis(100);
    s.OnCongestionEvent(Round(t, r++, 60000));
  }
  ASSERT_EQ(s.phase(), Bbr2Phase::kUp);
  EXPECT_DOUBLE_EQ(s.pacing_gain(), 1.25);
  // Round with 5% loss: too high, back to Down.
  SendPackets(s, 100);
  t = t + Duration::Millis(100);
  s.OnCongestionEvent(Round(t, r++, 80000, 5));
  EXPECT_EQ(s.phase(), Bbr2Phase::kDown);
  EXPECT_DOUBLE_EQ(s.pacing_gain(), 0.75);
}

TEST(Bbr2Sender, ProbeRttHalvesWindow) {
  Bbr2Sender s;
  for (RoundCount r = 1; r <= 4; ++r) s.OnCongestionEvent(Round(SimTime::Millis(100 * r), r, 100000));
  s.OnCongestionEvent(Round(SimTime::Millis(500), 5, 60000));
  ASSERT_EQ(s.state(), Bbr2State::kProbeBw);
  const ByteCount before = s.GetCongestionWindow();
  s.OnCongestionEvent(Round(SimTime::Millis(10700), 6, 60000, 0, Duration::Millis(120)));
  ASSERT_EQ(s.state(), Bbr2State::kProbeRtt);
  EXPECT_EQ(s.GetCongestionWindow(), std::max(before / 2, kBbrMinCwnd));
  EXPECT_EQ(s.probe_rtt_count(), 1u);
}

}  // namespace
}  // namespace bbrsim

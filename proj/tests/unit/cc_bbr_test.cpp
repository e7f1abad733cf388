#include <gtest/gtest.h>

#include <cmath>

#include "bbrsim/cc/bbr.hpp"
#include "bbrsim/cc/factory.hpp"

namespace bbrsim {
namespace {

constexpr double kLinkRate = 625000.0;  // 5 Mbps in B/s

Bandwidth Bps(double v) { return Bandwidth::BytesPerSecond(v); }

CongestionEvent Sample(SimTime now, double bw, Duration rtt, RoundCount round, ByteCount inflight,
                       bool round_end = true) {
  CongestionEvent ev;
  ev.now = now;
  ev.round = round;
  ev.is_round_end = round_end;
  ev.bytes_in_flight = inflight;
  ev.acked.push_back({round, kMaxSegmentSize, SimTime::Zero()});
  RateSample s;
  s.bw_es = Bps(bw);
  s.rtt_sample = rtt;
  ev.samples.push_back(s);
  return ev;
}

TEST(BandwidthFilter, KeepsMaxWithinTenRounds) {
  BandwidthFilter f;
  f.Update(Bps(10), 1);
  f.Update(Bps(8), 2);
  EXPECT_EQ(f.Get(2), Bps(10));
  EXPECT_EQ(f.Get(10), Bps(10));
  // The round-1 sample falls out once the window [round-9, round] excludes it.
  EXPECT_EQ(f.Get(11), Bps(8));
}

TEST(BandwidthFilter, AppLimitedSampleOnlyRaises) {
  BandwidthFilter f;
  f.Update(Bps(10), 1);
  f.Update(Bps(5), 2, true);
  f.Update(Bps(4), 3, true);
  EXPECT_EQ(f.Get(11), Bps(0)) << "app-limited samples below the max are discarded";
  f.Update(Bps(12), 12, true);
  EXPECT_EQ(f.Get(12), Bps(12));
}

TEST(MinRttFilter, TracksMinimumAndExpires) {
  MinRttFilter f;
  EXPECT_EQ(f.Update(Duration::Millis(100), SimTime::Zero()).min_rtt, Duration::Millis(100));
  EXPECT_EQ(f.Update(Duration::Millis(90), SimTime::Seconds(1)).min_rtt, Duration::Millis(90));
  EXPECT_EQ(f.Update(Duration::Millis(95), SimTime::Seconds(2)).min_rtt, Duration::Millis(90));
  EXPECT_FALSE(f.Update(Duration::Millis(95), SimTime::Millis(11000)).expired);
  const auto r = f.Update(Duration::Millis(120), SimTime::Millis(11100));
  EXPECT_TRUE(r.expired);
  EXPECT_EQ(r.min_rtt, Duration::Millis(120));
}

TEST(FullBandwidthDetector, DoublingNeverReaches) {
  FullBandwidthDetector d;
  double bw = 1000;
  for (int i = 0; i < 30; ++i, bw *= 2) EXPECT_FALSE(d.OnRound(Bps(bw)));
}

TEST(FullBandwidthDetector, ThreeFlatRoundsAfterPlateau) {
  FullBandwidthDetector d;
  EXPECT_FALSE(d.OnRound(Bps(1000)));
  EXPECT_FALSE(d.OnRound(Bps(1000)));
  EXPECT_FALSE(d.OnRound(Bps(1000)));
  EXPECT_TRUE(d.OnRound(Bps(1000)));
}

TEST(FullBandwidthDetector, SlowGrowthThenFlat) {
  FullBandwidthDetector d;
  EXPECT_FALSE(d.OnRound(Bps(1000)));
  EXPECT_FALSE(d.OnRound(Bps(1300)));  // +30%: resets
  EXPECT_EQ(d.count(), 0);
  EXPECT_FALSE(d.OnRound(Bps(1300)));
  EXPECT_FALSE(d.OnRound(Bps(1600)));  // +23%: not enough
  EXPECT_TRUE(d.OnRound(Bps(1600)));
}

TEST(BbrSender, BdpAndStartupGains) {
  BbrSender s;
  EXPECT_EQ(s.state(), BbrState::kStartup);
  s.OnCongestionEvent(Sample(SimTime::Millis(100), kLinkRate, Duration::Millis(100), 1, 10000));
  EXPECT_EQ(s.Bdp(), 62500u);
  EXPECT_DOUBLE_EQ(s.cwnd_gain(), 2.0);
  EXPECT_NEAR(s.GetPacingRate()->bytes_per_second(), kLinkRate * 2.0 / std::log(2.0), 1e-6);
  EXPECT_NEAR(s.GetPacingRate()->bytes_per_second(), 1803368.0, 1.0);
}

TEST(BbrSender, ReachesProbeBwWithTwoBdpWindow) {
  BbrSender s;
  SimTime t = SimTime::Zero();
  RoundCount round = 0;
  // Flat bandwidth: three rounds without growth end StartUp.
  for (int i = 0; i < 4; ++i) {
    t = t + Duration::Millis(100);
    s.OnCongestionEvent(Sample(t, kLinkRate, Duration::Millis(100), ++round, 100000));
  }
  EXPECT_EQ(s.state(), BbrState::kDrain);
  EXPECT_NEAR(s.pacing_gain(), std::log(2.0) / 2.0, 1e-12);
  t = t + Duration::Millis(100);
  s.OnCongestionEvent(Sample(t, kLinkRate, Duration::Millis(100), ++round, 60000));
  EXPECT_EQ(s.state(), BbrState::kProbeBw);
  for (int i = 0; i < 200; ++i) {
    t = t + Duration::Millis(10);
    s.OnCongestionEvent(Sample(t, kLinkRate, Duration::Millis(100), ++round, 60000));
  }
  EXPECT_EQ(s.GetCongestionWindow(), 125000u);
}

TEST(BbrSender, ProbeRttHoldsTwoHundredMillisAfterDrain) {
  BbrSender s;
  s.OnCongestionEvent(Sample(SimTime::Zero() + Duration::Millis(100), kLinkRate, Duration::Millis(100), 1, 10000));
  const SimTime t = SimTime::Millis(10201);
  s.OnCongestionEvent(Sample(t, kLinkRate, Duration::Millis(130), 2, 20000));
  ASSERT_EQ(s.state(), BbrState::kProbeRtt);
  EXPECT_EQ(s.GetCongestionWindow(), 4 * kMaxSegmentSize);
  EXPECT_EQ(s.probe_rtt_count(), 1u);
  s.OnCongestionEvent(Sample(t + Duration::Millis(30), kLinkRate, Duration::Millis(130), 3, 5000));
  ASSERT_TRUE(s.probe_rtt_done_at());
  EXPECT_EQ(*s.probe_rtt_done_at(), t + Duration::Millis(230));
  s.OnCongestionEvent(Sample(t + Duration::Millis(229), kLinkRate, Duration::Millis(130), 4, 5000));
  EXPECT_EQ(s.state(), BbrState::kProbeRtt);
  s.OnCongestionEvent(Sample(t + Duration::Millis(230), kLinkRate, Duration::Millis(130), 5, 5000));
  // Full bandwidth was never reached, so the sender goes back to StartUp.
  EXPECT_EQ(s.state(), BbrState::kStartup);
  EXPECT_EQ(s.min_rtt_filter().stamped_at(), t + Duration::Millis(230));
}

TEST(GainTables, Values) {
  const GainTable std_table{1.25, 0.75, 1, 1, 1, 1, 1, 1};
  EXPECT_EQ(GainTableFor(BbrVariant::kBbr), std_table);
  EXPECT_EQ(GainTableFor(BbrVariant::kBbrPrime), std_table);
  EXPECT_EQ(GainTableFor(BbrVariant::kBbrHsr), (GainTable{1.5, 0.5, 1.5, 0.5, 1.5, 0.5, 1.5, 0.5}));
  EXPECT_EQ(GainTableFor(BbrVariant::kTsunami), (GainTable{1.5, 0.75, 1.25, 1.25, 1.25, 1.25, 1.25, 1.25}));
}

class GainCycleTest : public ::testing::Test {
 protected:
  static constexpr ByteCount kBdp = 62500;
  const Duration rtt_min = Duration::Millis(100);
  const SimTime t0 = SimTime::Seconds(5);
};

TEST_F(GainCycleTest, BbrSlotTimerAndEarlyDrainExit) {
  GainCycle c(BbrVariant::kBbr, RngStream(1, 2));
  c.SetSlot(0, t0);
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(100), kBdp, kBdp, rtt_min, false), 1.25);
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(101), kBdp, kBdp, rtt_min, false), 0.75);
  // Probe-down ends on the timer even with a standing queue.
  const SimTime down = t0 + Duration::Millis(101);
  EXPECT_EQ(c.Advance(down + Duration::Millis(101), 2 * kBdp, kBdp, rtt_min, false), 1.0);
  // ...or early once inflight reaches the BDP.
  c.SetSlot(1, t0);
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(10), kBdp, kBdp, rtt_min, false), 1.0);
  EXPECT_EQ(c.offset(), 2);
}

TEST_F(GainCycleTest, BbrPrimeStaysDownUntilDrained) {
  GainCycle c(BbrVariant::kBbrPrime, RngStream(1, 2));
  c.SetSlot(1, t0);
  const auto stuck = static_cast<ByteCount>(1.4 * kBdp);
  for (int ms = 10; ms <= 300; ms += 10) {
    ASSERT_EQ(c.Advance(t0 + Duration::Millis(ms), stuck, kBdp, rtt_min, false), 0.75) << ms;
  }
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(310), kBdp, kBdp, rtt_min, false), 1.0);
}

TEST_F(GainCycleTest, BbrPlusCycleLengthDraw) {
  // Oracle: find a seed whose first draw is a multiple of 7 on the same stream.
  uint64_t seed = 1;
  while (RngStream(seed, FlowStream(StreamId::kGainCycle, 0)).NextU64() % 7 != 0) ++seed;
  GainCycle c(BbrVariant::kBbrPlus, RngStream(seed, FlowStream(StreamId::kGainCycle, 0)));
  c.Enter(t0);
  EXPECT_EQ(c.cycle_len(), 8);
  EXPECT_EQ(c.gain(), 1.0);

  uint64_t other = 1;
  while (RngStream(other, FlowStream(StreamId::kGainCycle, 0)).NextU64() % 7 != 6) ++other;
  GainCycle d(BbrVariant::kBbrPlus, RngStream(other, FlowStream(StreamId::kGainCycle, 0)));
  d.Enter(t0);
  EXPECT_EQ(d.cycle_len(), 2);
}

TEST_F(GainCycleTest, BbrPlusTransitions) {
  GainCycle c(BbrVariant::kBbrPlus, RngStream(1, 2));
  c.SetPlusState(0.75, 8, t0);
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(50), kBdp, kBdp, rtt_min, false), 1.0);

  c.SetPlusState(1.25, 8, t0);
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(50), kBdp, kBdp, rtt_min, true), 1.25) << "before RTT_min";
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(101), kBdp, kBdp, rtt_min, false), 1.25) << "no pressure";
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(101), kBdp, kBdp, rtt_min, true), 0.75);

  c.SetPlusState(1.25, 8, t0);
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(120), 80000, kBdp, rtt_min, false), 0.75) << "inflight > 1.25 BDP";

  c.SetPlusState(1.0, 3, t0);
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(300), kBdp, kBdp, rtt_min, false), 1.0);
  EXPECT_EQ(c.Advance(t0 + Duration::Millis(301), kBdp, kBdp, rtt_min, false), 1.25);
  EXPECT_EQ(c.stamp(), t0 + Duration::Millis(301));
  EXPECT_GE(c.cycle_len(), 2);
  EXPECT_LE(c.cycle_len(), 8);
}

TEST_F(GainCycleTest, EntrySlotSkipsProbeDown) {
  for (uint64_t seed = 1; seed <= 200; ++seed) {
    GainCycle c(BbrVariant::kBbr, RngStream(seed, 2));
    c.Enter(t0);
    ASSERT_NE(c.offset(), 1);
  }
}

TEST(RtpropCompensation, AddsLambdaStddev) {
  const std::vector<Duration> rtts{Duration::Millis(100), Duration::Millis(120), Duration::Millis(140)};
  EXPECT_EQ(RtpropCompensation(Duration::Millis(100), rtts, 1.0), Duration::Millis(120));
  EXPECT_EQ(RtpropCompensation(Duration::Millis(100), rtts, 0.0), Duration::Millis(100));
  const std::vector<Duration> flat(5, Duration::Millis(100));
  EXPECT_EQ(RtpropCompensation(Duration::Millis(100), flat, 1.0), Duration::Millis(100));
}

TEST(Factory, NamesRoundTrip) {
  for (auto name : kAlgorithmNames) {
    auto cc = MakeController(name);
    EXPECT_EQ(cc->name(), name);
  }
  EXPECT_THROW(MakeController("vegas"), std::invalid_argument);
  EXPECT_FALSE(IsKnownAlgorithm("vegas"));
}

TEST(Factory, PacingOnlyForRateBased) {
  EXPECT_FALSE(MakeController("reno")->GetPacingRate());
  EXPECT_FALSE(MakeController("cubic")->GetPacingRate());
  EXPECT_TRUE(MakeController("bbr")->GetPacingRate());
  EXPECT_TRUE(MakeController("bbr2")->GetPacingRate());
}

}  // namespace
}  // namespace bbrsim

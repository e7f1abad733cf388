#include <gtest/gtest.h>

#include <boost/crc.hpp>

#include <algorithm>
#include <array>
#include <set>
#include <sstream>
#include <vector>

#include "bbrsim/bbrsim.hpp"

namespace bbrsim {
namespace {

using harness::ExperimentConfig;
using harness::MakeExperiment;
using harness::RunExperiment;
using harness::Scenario;

ExperimentConfig Shortened(ExperimentConfig c, double seconds) {
  c.duration_s = seconds;
  for (auto& f : c.flows) {
    f.start_s = std::min(f.start_s, seconds / 2);
    f.stop_s = std::min(f.stop_s, seconds);
  }
  return c;
}

std::string Csvs(const harness::RunResult& r) {
  std::ostringstream os;
  metrics::WriteRatesCsv(os, r.recorder);
  metrics::WriteOwdCsv(os, r.recorder);
  metrics::WriteSummaryCsv(os, r.SummaryRows());
  return os.str();
}

TEST(Property, BandwidthFilterMatchesBruteForce) {
  RngStream rng(123, 99);
  for (int stream = 0; stream < 10000; ++stream) {
    BandwidthFilter f;
    std::vector<std::pair<RoundCount, double>> kept;
    RoundCount round = 0;
    const int n = 5 + static_cast<int>(rng.NextU64() % 40);
    for (int i = 0; i < n; ++i) {
      round += rng.NextU64() % 4;
      const double bw = rng.Uniform(0, 1e6);
      f.Update(Bandwidth::BytesPerSecond(bw), round);
      kept.emplace_back(round, bw);
      double best = 0.0;
      for (const auto& [r, v] : kept) {
        if (r + BandwidthFilter::kWindowRounds > round) best = std::max(best, v);
      }
      ASSERT_EQ(f.Get(round).bytes_per_second(), best) << "stream " << stream << " sample " << i;
    }
  }
}

TEST(Property, MinRttIsMinimumOverLifetime) {
  RngStream rng(7, 98);
  MinRttFilter f;
  std::vector<std::pair<SimTime, Duration>> all;
  SimTime now = SimTime::Zero();
  SimTime epoch = SimTime::Zero();
  for (int i = 0; i < 5000; ++i) {
    now = now + Duration::Millis(1 + static_cast<int64_t>(rng.NextU64() % 20));
    const Duration rtt = Duration::Millis(50 + static_cast<int64_t>(rng.NextU64() % 100));
    const bool expired = f.Update(rtt, now).expired;
    if (expired) epoch = now;
    all.emplace_back(now, rtt);
    Duration best = Duration::Infinite();
    for (const auto& [t, r] : all) {
      if (t >= epoch) best = std::min(best, r);
    }
    ASSERT_EQ(f.min_rtt(), best) << i;
  }
}

TEST(Property, JainScaleInvariantAndBounded) {
  RngStream rng(5, 97);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(2 + rng.NextU64() % 6);
    for (double& v : x) v = rng.Uniform(1, 1000);
    const double j = metrics::JainIndex(x);
    std::vector<double> scaled = x;
    for (double& v : scaled) v *= 37.5;
    EXPECT_NEAR(metrics::JainIndex(scaled), j, 1e-12);
    EXPECT_GE(j, 1.0 / static_cast<double>(x.size()) - 1e-12);
    EXPECT_LE(j, 1.0 + 1e-12);
    EXPECT_GE(metrics::MaxMinRatio(x), 1.0);
  }
}

TEST(Property, BbrPlusCycleLengthUniform) {
  GainCycle c(BbrVariant::kBbrPlus, RngStream(11, FlowStream(StreamId::kGainCycle, 0)));
  std::array<int, 9> counts{};
  constexpr int kN = 70000;
  for (int i = 0; i < kN; ++i) {
    const int len = c.DrawCycleLen();
    ASSERT_GE(len, 2);
    ASSERT_LE(len, 8);
    ++counts[len];
  }
  for (int len = 2; len <= 8; ++len) EXPECT_NEAR(counts[len], kN / 7.0, 0.05 * kN / 7.0) << len;
}

TEST(Property, ProbeBwEntrySlotUniform) {
  std::array<int, 8> counts{};
  constexpr int kN = 21000;
  for (int i = 0; i < kN; ++i) {
    GainCycle c(BbrVariant::kBbr, RngStream(static_cast<uint64_t>(i), FlowStream(StreamId::kGainCycle, 0)));
    c.Enter(SimTime::Zero());
    ++counts[c.offset()];
  }
  EXPECT_EQ(counts[1], 0);
  for (int slot : {0, 2, 3, 4, 5, 6, 7}) EXPECT_NEAR(counts[slot], kN / 7.0, 0.08 * kN / 7.0) << slot;
}

TEST(Property, CruiseDurationsInRange) {
  RngStream rng(3, FlowStream(StreamId::kCruiseInterval, 0));
  double lo = 10, hi = 0, sum = 0;
  constexpr int kN = 20000;
  for (int i = 0; i < kN; ++i) {
    const double d = rng.Uniform(kBbr2CruiseMin.ToSeconds(), kBbr2CruiseMax.ToSeconds());
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    sum += d;
  }
  EXPECT_GE(lo, 2.0);
  EXPECT_LT(hi, 3.0);
  EXPECT_NEAR(sum / kN, 2.5, 0.01);
}

TEST(Property, RunsAreByteIdentical) {
  for (const auto& c : {Shortened(MakeExperiment(Scenario::kIntraFairness, 1, "bbr"), 30),
                        Shortened(MakeExperiment(Scenario::kRttUnfairness, 7, "reno"), 30),
                        Shortened(MakeExperiment(Scenario::kUtilization, 2, "bbr2", 0.03), 30)}) {
    const auto a = RunExperiment(c);
    const auto b = RunExperiment(c);
    EXPECT_EQ(Csvs(a), Csvs(b)) << harness::ScenarioName(c.scenario) << ' ' << c.algo;
    EXPECT_EQ(a.events, b.events);
  }
}

TEST(Property, SeedChangesLossyRun) {
  const auto c = Shortened(MakeExperiment(Scenario::kUtilization, 2, "cubic", 0.05, 1), 20);
  auto d = c;
  d.seed = 2;
  EXPECT_NE(Csvs(RunExperiment(c)), Csvs(RunExperiment(d)));
}

TEST(Property, ConservationAndDeliveryEveryAlgorithm) {
  for (auto name : kAlgorithmNames) {
    const auto c = Shortened(MakeExperiment(Scenario::kIntraFairness, 1, std::string(name)), 20);
    harness::RunOptions opt;
    opt.audit_interval = Duration::Millis(100);
    const auto r = RunExperiment(c, opt);
    EXPECT_GT(r.audits, 150u) << name;
    EXPECT_EQ(r.audit_failures, 0u) << name;
    EXPECT_TRUE(r.delivery_consistent) << name;
    EXPECT_LE(r.util, 1.0) << name;
    for (const auto& f : r.flows) {
      EXPECT_LE(f.receiver_app_bytes, f.sender.packets_sent * kMaxSegmentSize) << name;
    }
  }
}

TEST(Property, PacingRateIsGainTimesBandwidth) {
  for (auto v : {BbrVariant::kBbr, BbrVariant::kBbrPrime, BbrVariant::kBbrPlus, BbrVariant::kBbrHsr,
                 BbrVariant::kTsunami}) {
    const std::string name(VariantName(v));
    const auto c = Shortened(MakeExperiment(Scenario::kIntraFairness, 3, name), 30);
    std::set<double> allowed{kStartupPacingGain, kDrainPacingGain, 1.0};
    for (double g : GainTableFor(v)) allowed.insert(g);
    uint64_t checked = 0;
    uint64_t bad = 0;
    harness::RunOptions opt;
    opt.send_observer = [&](const Sender& s) {
      const auto& bbr = dynamic_cast<const BbrSender&>(s.controller());
      if (bbr.bandwidth() <= Bandwidth::Zero()) return;
      ++checked;
      const double expect = bbr.bandwidth().bytes_per_second() * bbr.pacing_gain();
      const double got = bbr.GetPacingRate()->bytes_per_second();
      if (std::abs(got - expect) > 1e-9 * expect || !allowed.count(bbr.pacing_gain())) ++bad;
    };
    RunExperiment(c, opt);
    EXPECT_GT(checked, 1000u) << name;
    EXPECT_EQ(bad, 0u) << name;
  }
}

TEST(Property, StreamDeliveredExactlyOnceUnderLoss) {
  const auto c = Shortened(MakeExperiment(Scenario::kUtilization, 2, "bbr", 0.05), 20);
  harness::RunOptions opt;
  opt.verify_payload = true;
  const auto r = RunExperiment(c, opt);
  for (const auto& f : r.flows) {
    ASSERT_GT(f.receiver_app_bytes, 0u);
    EXPECT_GT(f.sender.retransmitted_frames, 0u);
    boost::crc_32_type oracle;
    for (ByteCount i = 0; i < f.receiver_app_bytes; ++i) oracle.process_byte(PayloadByte(i));
    EXPECT_EQ(f.payload_crc, oracle.checksum()) << "flow " << f.spec.id;
  }
}

}  // namespace
}  // namespace bbrsim

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbrsim/cc/factory.hpp"
#include "bbrsim/harness/config.hpp"
#include "bbrsim/metrics/csv.hpp"
#include "bbrsim/metrics/formulas.hpp"
#include "bbrsim/metrics/recorder.hpp"
#include "bbrsim/net/topology.hpp"
#include "bbrsim/transport/receiver.hpp"
#include "bbrsim/transport/sender.hpp"

namespace bbrsim::harness {

struct FlowResult {
  FlowSpec spec;
  metrics::FlowStats stats;
  ByteCount receiver_app_bytes = 0;
  SenderStats sender;
  uint32_t payload_crc = 0;
  uint64_t probe_rtt_count = 0;

  double avg_rate_Bps() const { return metrics::AverageRate(static_cast<double>(stats.bytes_received_app), stats.duration_s()); }
  double loss_rate() const {
    return metrics::LossRate(static_cast<double>(stats.packets_lost), static_cast<double>(stats.packets_sent));
  }
};

struct RunResult {
  ExperimentConfig config;
  std::vector<FlowResult> flows;
  metrics::Recorder recorder;

  double jain = 0.0;
  double ratio = 0.0;
  double util = 0.0;
  double mean_owd_ms = 0.0;
  double loss_rate = 0.0;

  uint64_t audits = 0;
  uint64_t audit_failures = 0;
  bool delivery_consistent = true;
  uint64_t events = 0;

  std::vector<double> Rates() const {
    std::vector<double> r;
    for (const auto& f : flows) r.push_back(f.avg_rate_Bps());
    return r;
  }

  const FlowResult& flow(uint32_t id) const {
    for (const auto& f : flows) {
      if (f.spec.id == id) return f;
    }
    throw std::out_of_range("no flow " + std::to_string(id));
  }

  std::vector<metrics::SummaryRow> SummaryRows() const {
    std::vector<metrics::SummaryRow> rows;
    const std::string scen = ScenarioName(config.scenario);
    const std::string label = config.CaseLabel();
    double mean_rate = 0.0;
    for (const FlowResult& f : flows) {
      metrics::SummaryRow r;
      r.scenario = scen;
      r.case_id = label;
      r.algo = f.spec.algo;
      r.flow_id = std::to_string(f.spec.id + 1);
      r.avg_rate_bps = f.avg_rate_Bps() * 8.0;
      r.mean_owd_ms = f.stats.mean_owd_ms();
      r.loss_rate = f.loss_rate();
      mean_rate += r.avg_rate_bps / static_cast<double>(flows.size());
      rows.push_back(r);
    }
    metrics::SummaryRow all;
    all.scenario = scen;
    all.case_id = label;
    all.algo = config.algo;
    all.flow_id = "all";
    all.avg_rate_bps = mean_rate;
    all.jain = jain;
    all.ratio = ratio;
    all.util = util;
    all.mean_owd_ms = mean_owd_ms;
    all.loss_rate = loss_rate;
    rows.push_back(all);
    return rows;
  }
};

struct RunOptions {
  bool verify_payload = false;
  Duration audit_interval = Duration::Seconds(1);
  // Called after every transmission, with the flow's sender.
  std::function<void(const Sender&)> send_observer;
};

namespace internal {

inline FlowPath ResolvePath(const std::vector<std::string>& links) {
  auto spec = [](const std::string& name) -> const LinkSpec& {
    for (const auto& s : kDumbbellLinks) {
      if (name == s.name) return s;
    }
    throw ConfigError("unknown link in path: " + name);
  };
  FlowPath p;
  p.links = links;
  if (links.empty()) throw ConfigError("empty path");
  const LinkSpec& first = spec(links.front());
  const LinkSpec& last = spec(links.back());
  if (links.size() == 1) {
    p.src = first.a;
    p.dst = first.b;
    return p;
  }
  const LinkSpec& second = spec(links[1]);
  const LinkSpec& before_last = spec(links[links.size() - 2]);
  auto touches = [](const LinkSpec& l, Node n) { return l.a == n || l.b == n; };
  p.src = touches(second, first.a) ? first.b : first.a;
  p.dst = touches(before_last, last.a) ? last.b : last.a;
  return p;
}

}  // namespace internal

inline RunResult RunExperiment(const ExperimentConfig& config, const RunOptions& options = {}) {
  config.Validate();
  RunResult result;
  result.config = config;

  Simulator sim;
  LinkConfig bottleneck;
  bottleneck.bandwidth_bps = config.capacity.empty() ? config.bandwidth_bps : config.capacity.front().bandwidth_bps;
  bottleneck.prop_delay = Duration::FromSeconds(config.prop_delay_ms / 1000.0);
  bottleneck.queue_limit_bytes = config.queue_bytes;
  bottleneck.random_loss_rate = config.loss;

  std::map<std::string, LinkConfig> side;
  for (const auto& [name, l] : config.side_links) {
    side[name] = LinkConfig{l.bandwidth_bps, Duration::FromSeconds(l.prop_delay_ms / 1000.0), l.queue_bytes, 0.0};
  }
  std::map<FlowId, FlowPath> paths;
  for (const FlowSpec& f : config.flows) paths[f.id] = internal::ResolvePath(f.path);

  std::unique_ptr<Topology> topo;
  try {
    bottleneck.Validate();
    for (const auto& [_, l] : side) l.Validate();
    topo = Topology::BuildDumbbell(sim, bottleneck, side, paths, config.seed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (size_t i = 1; i < config.capacity.size(); ++i) {
    topo->BottleneckForward().SetBandwidth(config.capacity[i].bandwidth_bps,
                                           SimTime::FromSeconds(config.capacity[i].at_s));
  }

  TraceSink sink = result.recorder.Sink();
  std::vector<std::unique_ptr<Sender>> senders;
  std::vector<std::unique_ptr<Receiver>> receivers;
  for (const FlowSpec& f : config.flows) {
    ControllerParams params{config.seed, f.id, config.rtprop_compensation, config.lambda};
    auto sender = std::make_unique<Sender>(sim, f.id, MakeController(f.algo, params),
                                           [&topo](Packet p) { topo->Send(std::move(p)); }, sink);
    auto receiver = std::make_unique<Receiver>(sim, f.id, [&topo](Packet p) { topo->Send(std::move(p)); }, sink);
    receiver->set_verify_payload(options.verify_payload);
    topo->AttachReceiver(f.id, [r = receiver.get()](Packet p) { r->OnPacket(p); });
    topo->AttachSender(f.id, [s = sender.get()](Packet p) { s->OnAckPacket(p); });
    if (options.send_observer) sender->set_send_observer(options.send_observer);
    sender->set_send_jitter(Duration::FromSeconds(config.send_jitter_ms / 1000.0),
                            RngStream(config.seed, FlowStream(StreamId::kSendJitter, f.id)));
    sender->Schedule(SimTime::FromSeconds(f.start_s), SimTime::FromSeconds(f.stop_s));
    senders.push_back(std::move(sender));
    receivers.push_back(std::move(receiver));
  }

  const SimTime end = SimTime::FromSeconds(config.duration_s);
  std::function<void()> audit = [&] {
    ++result.audits;
    bool ok = topo->ConservationHolds();
    for (const auto& s : senders) ok = ok && s->OutstandingBytes() == s->bytes_in_flight();
    if (!ok) ++result.audit_failures;
    if (sim.Now() + options.audit_interval <= end) sim.ScheduleIn(options.audit_interval, audit);
  };
  sim.Schedule(SimTime::Zero(), audit);
  sim.RunUntil(end);
  audit();
  result.events = sim.executed();

  std::vector<double> owd_means;
  uint64_t lost = 0;
  uint64_t sent = 0;
  double app_bytes = 0.0;
  for (size_t i = 0; i < config.flows.size(); ++i) {
    const FlowSpec& f = config.flows[i];
    const Sender& s = *senders[i];
    const Receiver& r = *receivers[i];
    FlowResult fr;
    fr.spec = f;
    fr.sender = s.stats();
    fr.receiver_app_bytes = r.bytes_delivered_app();
    fr.payload_crc = r.payload_crc();
    fr.stats.flow_id = f.id;
    fr.stats.start_s = f.start_s;
    fr.stats.stop_s = f.stop_s;
    fr.stats.packets_sent = s.stats().packets_sent;
    fr.stats.packets_lost = topo->drops(f.id).total();
    auto it = result.recorder.flows().find(f.id);
    if (it != result.recorder.flows().end()) {
      fr.stats.bytes_received_app = it->second.delivered_bytes;
      fr.stats.owd_samples = it->second.owd_samples;
      fr.stats.owd_sum_ms = it->second.owd_sum_ms;
    }
    if (fr.stats.bytes_received_app != fr.receiver_app_bytes) result.delivery_consistent = false;
    if (const auto* bbr = dynamic_cast<const BbrSender*>(&s.controller())) fr.probe_rtt_count = bbr->probe_rtt_count();
    if (const auto* bbr2 = dynamic_cast<const Bbr2Sender*>(&s.controller())) fr.probe_rtt_count = bbr2->probe_rtt_count();
    owd_means.push_back(fr.stats.mean_owd_ms());
    lost += fr.stats.packets_lost;
    sent += fr.stats.packets_sent;
    app_bytes += static_cast<double>(fr.stats.bytes_received_app);
    result.flows.push_back(fr);
  }

  const std::vector<double> rates = result.Rates();
  const bool any_traffic = std::any_of(rates.begin(), rates.end(), [](double x) { return x > 0.0; });
  result.jain = any_traffic ? metrics::JainIndex(rates) : 0.0;
  result.ratio = *std::min_element(rates.begin(), rates.end()) > 0.0
                     ? metrics::MaxMinRatio(rates)
                     : std::numeric_limits<double>::infinity();
  result.util = metrics::ChannelUtilization(app_bytes, config.CapacityBitSeconds());
  result.mean_owd_ms = metrics::MeanOfMeans(owd_means);
  result.loss_rate = metrics::LossRate(static_cast<double>(lost), static_cast<double>(sent));
  return result;
}

inline std::filesystem::path RunDirectory(const std::filesystem::path& root, const ExperimentConfig& c) {
  return root / ScenarioName(c.scenario) / ("case" + c.CaseLabel()) / c.algo /
         ("seed" + std::to_string(c.seed));
}

inline void WriteRunOutputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
  };
  {
    auto os = open("rates.csv");
    metrics::WriteRatesCsv(os, r.recorder);
  }
  {
    auto os = open("owd.csv");
    metrics::WriteOwdCsv(os, r.recorder);
  }
  {
    auto os = open("summary.csv");
    metrics::WriteSummaryCsv(os, r.SummaryRows());
  }
  {
    auto os = open("config.ini");
    WriteIni(os, r.config);
  }
}

}  // namespace bbrsim::harness

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "bbrsim/sim/time.hpp"
#include "bbrsim/transport/trace.hpp"

namespace bbrsim::metrics {

inline constexpr Duration kBinWidth = Duration::Millis(100);

struct Bin {
  double sum = 0.0;
  uint64_t count = 0;
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

struct FlowStats {
  FlowId flow_id = 0;
  ByteCount bytes_received_app = 0;
  double start_s = 0.0;
  double stop_s = 0.0;
  uint64_t packets_sent = 0;
  uint64_t packets_lost = 0;  // dropped in the network
  uint64_t owd_samples = 0;
  double owd_sum_ms = 0.0;

  double duration_s() const { return stop_s - start_s; }
  double mean_owd_ms() const {
    return owd_samples ? owd_sum_ms / static_cast<double>(owd_samples) : 0.0;
  }
};

// Collects per-flow trace records into 100 ms bins: controller rate samples
// taken at each send, one-way delay of each received packet, and stream
// bytes delivered to the application.
class Recorder {
 public:
  void OnTrace(const TraceRecord& r) {
    FlowSeries& f = flows_[r.flow];
    const size_t bin = static_cast<size_t>(r.time.micros() / kBinWidth.micros());
    switch (r.event) {
      case TraceEvent::kSend:
        Add(f.rate, bin, r.value);
        break;
      case TraceEvent::kOwd:
        Add(f.owd, bin, r.value);
        ++f.owd_samples;
        f.owd_sum_ms += r.value;
        break;
      case TraceEvent::kDeliver:
        Add(f.delivered, bin, r.value);
        f.delivered_bytes += static_cast<ByteCount>(r.value);
        break;
      case TraceEvent::kAck:
      case TraceEvent::kLoss:
        break;
    }
  }

  TraceSink Sink() {
    return [this](const TraceRecord& r) { OnTrace(r); };
  }

  struct FlowSeries {
    std::vector<Bin> rate;       // bytes/s
    std::vector<Bin> owd;        // ms
    std::vector<Bin> delivered;  // bytes per bin (sum)
    uint64_t owd_samples = 0;
    double owd_sum_ms = 0.0;
    ByteCount delivered_bytes = 0;
  };

  const std::map<FlowId, FlowSeries>& flows() const { return flows_; }

  const FlowSeries& flow(FlowId id) const {
    auto it = flows_.find(id);
    if (it == flows_.end()) throw std::out_of_range("Recorder: unknown flow");
    return it->second;
  }

  // App bytes delivered to `flow` in [from, to).
  ByteCount DeliveredBetween(FlowId id, SimTime from, SimTime to) const {
    auto it = flows_.find(id);
    if (it == flows_.end()) return 0;
    const auto& bins = it->second.delivered;
    const size_t a = static_cast<size_t>(from.micros() / kBinWidth.micros());
    const size_t b = static_cast<size_t>(to.micros() / kBinWidth.micros());
    double total = 0.0;
    for (size_t i = a; i < b && i < bins.size(); ++i) total += bins[i].sum;
    return static_cast<ByteCount>(total);
  }

 private:
  static void Add(std::vector<Bin>& bins, size_t i, double v) {
    if (bins.size() <= i) bins.resize(i + 1);
    bins[i].sum += v;
    ++bins[i].count;
  }

  std::map<FlowId, FlowSeries> flows_;
};

}  // namespace bbrsim::metrics

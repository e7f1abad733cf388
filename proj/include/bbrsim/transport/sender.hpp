#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <utility>

#include "bbrsim/cc/congestion_controller.hpp"
#include "bbrsim/net/packet.hpp"
#include "bbrsim/sim/rng.hpp"
#include "bbrsim/sim/simulator.hpp"
#include "bbrsim/transport/loss_detector.hpp"
#include "bbrsim/transport/pacer.hpp"
#include "bbrsim/transport/rate_sampler.hpp"
#include "bbrsim/transport/rtt_stats.hpp"
#include "bbrsim/transport/trace.hpp"

namespace bbrsim {

struct SenderStats {
  uint64_t packets_sent = 0;
  uint64_t packets_acked = 0;
  uint64_t packets_declared_lost = 0;
  uint64_t retransmitted_frames = 0;
  uint64_t bytes_sent = 0;
  uint64_t timeouts = 0;
};

// Sending half of the simplified transport: one stream, STREAM and
// STOP_WAITING frames out, ACK frames in. Lost data goes out again under a
// fresh packet number.
class Sender {
 public:
  using OutputFn = std::function<void(Packet)>;
  using SendObserver = std::function<void(const Sender&)>;

  static constexpr Duration kMinRto = Duration::Millis(200);
  static constexpr Duration kInitialRto = Duration::Seconds(1);

  Sender(Simulator& sim, FlowId flow, std::unique_ptr<CongestionController> cc, OutputFn output,
         TraceSink trace = {})
      : sim_(sim), flow_(flow), cc_(std::move(cc)), output_(std::move(output)), trace_(std::move(trace)) {}

  Sender(const Sender&) = delete;
  Sender& operator=(const Sender&) = delete;

  // Bulk transfer between `start` and `stop`. `stream_length` bounds the
  // data; the default is unlimited.
  void Schedule(SimTime start, SimTime stop,
                ByteCount stream_length = std::numeric_limits<ByteCount>::max()) {
    stream_length_ = stream_length;
    sim_.Schedule(start, [this] { Start(); });
    sim_.Schedule(stop, [this] { Stop(); });
  }

  void Start() {
    active_ = true;
    start_time_ = sim_.Now();
    sampler_ = DeliveryRateSampler(*start_time_);
    TrySend();
  }

  void Stop() {
    active_ = false;
    stop_time_ = sim_.Now();
    sim_.Cancel(send_timer_);
    sim_.Cancel(loss_timer_);
    sim_.Cancel(rto_timer_);
  }

  void OnAckPacket(const Packet& packet) {
    const AckFrame* ack = packet.Find<AckFrame>();
    if (ack == nullptr || ack->ranges.empty()) return;
    const SimTime now = sim_.Now();

    std::vector<SentPacketRecord> newly_acked;
    for (const AckRange& range : ack->ranges) {
      auto it = unacked_.lower_bound(range.first);
      while (it != unacked_.end() && it->first <= range.last) {
        newly_acked.push_back(it->second);
        it = unacked_.erase(it);
      }
    }
    if (newly_acked.empty()) return;
    std::sort(newly_acked.begin(), newly_acked.end(),
              [](const auto& a, const auto& b) { return a.packet_number < b.packet_number; });

    CongestionEvent ev;
    ev.now = now;
    ev.prior_in_flight = bytes_in_flight_;
    largest_acked_ = std::max(largest_acked_, ack->largest_acked);

    bool round_end = false;
    for (const SentPacketRecord& r : newly_acked) {
      bytes_in_flight_ -= r.size_bytes;
      ++stats_.packets_acked;
      ev.acked.push_back({r.packet_number, r.size_bytes, r.sent_time});
      if (rounds_.OnPacketAcked(r.packet_number)) round_end = true;
      if (auto s = sampler_.OnPacketAcked(r, now)) ev.samples.push_back(*s);
    }
    rtt_.UpdateRtt(now - newly_acked.back().sent_time);
    Trace(TraceEvent::kAck, static_cast<double>(ev.bytes_acked()));

    DetectLosses(now, ev);

    if (!ev.samples.empty()) {
      for (auto& s : ev.samples) s.bytes_lost_in_round = bytes_lost_in_round_;
      ev.samples.back().is_round_end = round_end;
    }
    ev.is_round_end = round_end;
    FinishEvent(ev);
    if (round_end) bytes_lost_in_round_ = 0;

    rto_backoff_ = 0;
    RearmRto();
    TrySend();
  }

  SimTime now() const { return sim_.Now(); }
  bool active() const { return active_; }
  FlowId flow_id() const { return flow_; }
  ByteCount bytes_in_flight() const { return bytes_in_flight_; }
  PacketNumber largest_sent() const { return largest_sent_; }
  PacketNumber largest_acked() const { return largest_acked_; }
  const RttStats& rtt_stats() const { return rtt_; }
  const SenderStats& stats() const { return stats_; }
  const CongestionController& controller() const { return *cc_; }
  CongestionController& controller() { return *cc_; }
  RoundCount round_count() const { return rounds_.count(); }
  std::optional<SimTime> start_time() const { return start_time_; }
  std::optional<SimTime> stop_time() const { return stop_time_; }
  const DeliveryRateSampler& sampler() const { return sampler_; }

  // Sum of sizes over outstanding records; equals bytes_in_flight().
  ByteCount OutstandingBytes() const {
    ByteCount n = 0;
    for (const auto& [_, r] : unacked_) n += r.size_bytes;
    return n;
  }

  // Called right after every transmission.
  void set_send_observer(SendObserver fn) { send_observer_ = std::move(fn); }

  // Host processing delay for window-clocked controllers: each packet
  // leaves the host up to `max` after it is sent, order preserved. The
  // packet keeps its send timestamp. Breaks drop-tail phase lock between
  // unpaced flows.
  void set_send_jitter(Duration max, RngStream rng) {
    send_jitter_ = max;
    jitter_rng_.emplace(std::move(rng));
  }

 private:
  bool HasDataToSend() const {
    return !retransmit_.empty() || next_offset_ < stream_length_;
  }

  void TrySend() {
    while (active_) {
      if (!HasDataToSend()) {
        app_limited_ = bytes_in_flight_ < cc_->GetCongestionWindow();
        return;
      }
      if (bytes_in_flight_ >= cc_->GetCongestionWindow()) return;
      const SimTime now = sim_.Now();
      if (cc_->GetPacingRate()) {
        const SimTime release = pacer_.NextSendTime(now);
        if (release > now) {
          ArmSendTimer(release);
          return;
        }
      }
      SendOnePacket(now);
    }
  }

  void ArmSendTimer(SimTime at) {
    if (sim_.IsPending(send_timer_)) {
      if (send_timer_.fire_at <= at) return;
      sim_.Cancel(send_timer_);
    }
    send_timer_ = sim_.Schedule(at, [this] { TrySend(); });
  }

  void SendOnePacket(SimTime now) {
    StreamFrame data;
    if (!retransmit_.empty()) {
      data = retransmit_.front();
      retransmit_.pop_front();
      ++stats_.retransmitted_frames;
    } else {
      data.offset = next_offset_;
      data.length = std::min<ByteCount>(kMaxSegmentSize, stream_length_ - next_offset_);
      next_offset_ += data.length;
    }
    const PacketNumber pn = ++largest_sent_;
    const PacketNumber least_unacked = unacked_.empty() ? pn : unacked_.begin()->first;

    Packet p;
    p.flow_id = flow_;
    p.kind = PacketKind::kData;
    p.packet_number = pn;
    p.size_bytes = data.length + kHeaderSize;
    p.sent_time = now;
    p.frames.emplace_back(data);
    p.frames.emplace_back(StopWaitingFrame{least_unacked});

    SentPacketRecord record = sampler_.OnPacketSent(pn, p.size_bytes, now, app_limited_);
    record.data = data;
    unacked_.emplace(pn, record);
    bytes_in_flight_ += p.size_bytes;
    rounds_.OnPacketSent(pn);
    ++stats_.packets_sent;
    stats_.bytes_sent += p.size_bytes;

    cc_->OnPacketSent(now, pn, p.size_bytes, bytes_in_flight_);
    const auto rate = cc_->GetPacingRate();
    pacer_.OnPacketSent(now, p.size_bytes, rate.value_or(Bandwidth::Infinite()));
    Trace(TraceEvent::kSend, cc_->TraceRate(rtt_.smoothed_rtt()).bytes_per_second());
    if (send_observer_) send_observer_(*this);
    if (!sim_.IsPending(rto_timer_)) RearmRto();
    if (jitter_rng_ && send_jitter_ > Duration::Zero() && !rate) {
      const SimTime at = std::max(last_release_, now + Duration::FromSeconds(jitter_rng_->Uniform(
                                                           0.0, send_jitter_.ToSeconds())));
      last_release_ = at;
      sim_.Schedule(at, [this, p = std::move(p)]() mutable { output_(std::move(p)); });
      return;
    }
    output_(std::move(p));
  }

  void DetectLosses(SimTime now, CongestionEvent& ev) {
    std::optional<SimTime> loss_time;
    auto lost = LossDetector::DetectLosses(unacked_, largest_acked_, now, rtt_.smoothed_rtt(),
                                           rtt_.latest_rtt(), &loss_time);
    DeclareLost(lost, ev);
    sim_.Cancel(loss_timer_);
    if (loss_time && active_) {
      loss_timer_ = sim_.Schedule(std::max(*loss_time, now), [this] { OnLossTimer(); });
    }
  }

  void DeclareLost(const std::vector<SentPacketRecord>& lost, CongestionEvent& ev) {
    for (const SentPacketRecord& r : lost) {
      bytes_in_flight_ -= r.size_bytes;
      bytes_lost_in_round_ += r.size_bytes;
      ++stats_.packets_declared_lost;
      if (r.data.length > 0) retransmit_.push_back(r.data);
      ev.lost.push_back({r.packet_number, r.size_bytes});
      Trace(TraceEvent::kLoss, static_cast<double>(r.size_bytes));
    }
  }

  void FinishEvent(CongestionEvent& ev) {
    ev.bytes_in_flight = bytes_in_flight_;
    ev.round = rounds_.count();
    ev.latest_rtt = rtt_.latest_rtt();
    ev.smoothed_rtt = rtt_.smoothed_rtt();
    ev.min_rtt = rtt_.min_rtt();
    cc_->OnCongestionEvent(ev);
  }

  void OnLossTimer() {
    CongestionEvent ev;
    ev.now = sim_.Now();
    ev.prior_in_flight = bytes_in_flight_;
    DetectLosses(ev.now, ev);
    if (ev.lost.empty()) return;
    FinishEvent(ev);
    TrySend();
  }

  Duration CurrentRto() const {
    Duration rto = kInitialRto;
    if (rtt_.has_sample()) {
      rto = std::max(kMinRto, rtt_.smoothed_rtt() + rtt_.rtt_var() * int64_t{4});
    }
    return rto * (int64_t{1} << std::min(rto_backoff_, 6));
  }

  void RearmRto() {
    sim_.Cancel(rto_timer_);
    if (!active_ || unacked_.empty()) return;
    rto_timer_ = sim_.ScheduleIn(CurrentRto(), [this] { OnRetransmissionTimeout(); });
  }

  void OnRetransmissionTimeout() {
    if (unacked_.empty()) return;
    ++stats_.timeouts;
    CongestionEvent ev;
    ev.now = sim_.Now();
    ev.prior_in_flight = bytes_in_flight_;
    std::vector<SentPacketRecord> all;
    for (auto& [_, r] : unacked_) all.push_back(r);
    unacked_.clear();
    DeclareLost(all, ev);
    FinishEvent(ev);
    cc_->OnRetransmissionTimeout(ev.now);
    ++rto_backoff_;
    TrySend();
    RearmRto();
  }

  void Trace(TraceEvent e, double value) {
    if (trace_) trace_(TraceRecord{sim_.Now(), flow_, e, value});
  }

  Simulator& sim_;
  FlowId flow_;
  std::unique_ptr<CongestionController> cc_;
  OutputFn output_;
  TraceSink trace_;
  SendObserver send_observer_;

  bool active_ = false;
  bool app_limited_ = false;
  std::optional<SimTime> start_time_;
  std::optional<SimTime> stop_time_;
  ByteCount stream_length_ = std::numeric_limits<ByteCount>::max();
  ByteCount next_offset_ = 0;
  std::deque<StreamFrame> retransmit_;

  PacketNumber largest_sent_ = 0;
  PacketNumber largest_acked_ = 0;
  ByteCount bytes_in_flight_ = 0;
  ByteCount bytes_lost_in_round_ = 0;
  std::map<PacketNumber, SentPacketRecord> unacked_;

  DeliveryRateSampler sampler_;
  RoundTripCounter rounds_;
  RttStats rtt_;
  Pacer pacer_;
  int rto_backoff_ = 0;
  EventId send_timer_;
  EventId loss_timer_;
  EventId rto_timer_;
  SenderStats stats_;
  Duration send_jitter_ = Duration::Zero();
  std::optional<RngStream> jitter_rng_;
  SimTime last_release_;
};

}  // namespace bbrsim

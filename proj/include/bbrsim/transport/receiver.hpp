#pragma once

#include <boost/crc.hpp>
#include <boost/icl/interval_set.hpp>

#include <cstdint>
#include <functional>
#include <utility>

#include "bbrsim/net/packet.hpp"
#include "bbrsim/sim/simulator.hpp"
#include "bbrsim/transport/trace.hpp"

namespace bbrsim {

// Content of the simulated byte stream at `offset`.
inline uint8_t PayloadByte(ByteCount offset) {
  return static_cast<uint8_t>((offset * 2654435761ULL) >> 7);
}

struct ReceiverStats {
  uint64_t packets_received = 0;
  uint64_t duplicate_packets = 0;
  uint64_t bytes_received = 0;      // wire bytes of unique packets
  ByteCount bytes_delivered_app = 0;  // in-order stream bytes handed up
  uint64_t owd_samples = 0;
  double owd_sum_ms = 0.0;
};

// Receiving half: acknowledges every packet at once, records one-way delay
// from the sender timestamp, and reassembles the stream in order.
class Receiver {
 public:
  using OutputFn = std::function<void(Packet)>;
  static constexpr size_t kMaxAckRanges = 64;

  Receiver(Simulator& sim, FlowId flow, OutputFn output, TraceSink trace = {})
      : sim_(sim), flow_(flow), output_(std::move(output)), trace_(std::move(trace)) {}

  // Enables a CRC-32 over the delivered byte stream.
  void set_verify_payload(bool on) { verify_payload_ = on; }

  void OnPacket(const Packet& packet) {
    const SimTime now = sim_.Now();
    const PacketNumber pn = packet.packet_number;
    const bool duplicate = pn < least_unacked_ || boost::icl::contains(received_, pn);
    if (duplicate) {
      ++stats_.duplicate_packets;
    } else {
      received_.add(pn);
      ++stats_.packets_received;
      stats_.bytes_received += packet.size_bytes;
      const double owd_ms = (now - packet.sent_time).ToMillis();
      ++stats_.owd_samples;
      stats_.owd_sum_ms += owd_ms;
      if (trace_) trace_(TraceRecord{now, flow_, TraceEvent::kOwd, owd_ms});
      if (const auto* stream = packet.Find<StreamFrame>()) OnStreamFrame(*stream);
    }
    if (const auto* sw = packet.Find<StopWaitingFrame>()) {
      if (sw->least_unacked > least_unacked_) {
        least_unacked_ = sw->least_unacked;
        received_.erase(boost::icl::interval<PacketNumber>::right_open(0, least_unacked_));
      }
    }
    output_(BuildAck(packet));
  }

  const ReceiverStats& stats() const { return stats_; }
  ByteCount bytes_delivered_app() const { return stats_.bytes_delivered_app; }
  uint32_t payload_crc() const { return crc_.checksum(); }
  double mean_owd_ms() const {
    return stats_.owd_samples ? stats_.owd_sum_ms / static_cast<double>(stats_.owd_samples) : 0.0;
  }

  AckFrame CurrentAck() const {
    AckFrame ack;
    for (auto it = received_.rbegin(); it != received_.rend() && ack.ranges.size() < kMaxAckRanges; ++it) {
      ack.ranges.push_back({boost::icl::first(*it), boost::icl::last(*it)});
    }
    if (!ack.ranges.empty()) ack.largest_acked = ack.ranges.front().last;
    return ack;
  }

 private:
  Packet BuildAck(const Packet& data) {
    Packet ack;
    ack.flow_id = flow_;
    ack.kind = PacketKind::kAck;
    ack.size_bytes = kAckPacketSize;
    ack.sent_time = sim_.Now();
    AckFrame frame = CurrentAck();
    if (frame.ranges.empty()) {
      // Everything below least_unacked was already acknowledged.
      frame.ranges.push_back({data.packet_number, data.packet_number});
      frame.largest_acked = data.packet_number;
    }
    ack.frames.emplace_back(std::move(frame));
    return ack;
  }

  void OnStreamFrame(const StreamFrame& f) {
    if (f.length == 0) return;
    const ByteCount end = f.offset + f.length;
    if (end <= delivered_) return;
    stream_.add(boost::icl::interval<ByteCount>::right_open(f.offset, end));
    auto first = stream_.begin();
    if (first == stream_.end() || boost::icl::first(*first) > delivered_) return;
    const ByteCount new_end = boost::icl::last(*first) + 1;
    if (verify_payload_) {
      for (ByteCount i = delivered_; i < new_end; ++i) crc_.process_byte(PayloadByte(i));
    }
    stats_.bytes_delivered_app += new_end - delivered_;
    if (trace_) {
      trace_(TraceRecord{sim_.Now(), flow_, TraceEvent::kDeliver, static_cast<double>(new_end - delivered_)});
    }
    delivered_ = new_end;
    stream_.erase(boost::icl::interval<ByteCount>::right_open(0, delivered_));
  }

  Simulator& sim_;
  FlowId flow_;
  OutputFn output_;
  TraceSink trace_;
  bool verify_payload_ = false;

  PacketNumber least_unacked_ = 0;
  // Received packet numbers at or above least_unacked_.
  boost::icl::interval_set<PacketNumber> received_;
  boost::icl::interval_set<ByteCount> stream_;
  ByteCount delivered_ = 0;
  boost::crc_32_type crc_;
  ReceiverStats stats_;
};

}  // namespace bbrsim

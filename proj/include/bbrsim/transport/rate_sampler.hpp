#pragma once

#include <optional>

#include "bbrsim/cc/congestion_controller.hpp"
#include "bbrsim/net/packet.hpp"
#include "bbrsim/sim/time.hpp"
#include "bbrsim/sim/units.hpp"

namespace bbrsim {

// Per-packet send-time state. The two snapshots never change after send.
struct SentPacketRecord {
  PacketNumber packet_number = 0;
  ByteCount size_bytes = 0;
  SimTime sent_time;
  ByteCount total_byte_acked_snapshot = 0;
  SimTime last_acked_packet_ack_time_snapshot;
  bool is_app_limited = false;
  // Stream data carried, for retransmission under a new number.
  StreamFrame data;
};

// Delivery-rate estimator. On send, the record captures how many bytes had
// been acknowledged and when the latest ACK arrived; on ACK, the bytes
// delivered since then over the time elapsed since then is one bandwidth
// sample.
class DeliveryRateSampler {
 public:
  explicit DeliveryRateSampler(SimTime start = SimTime::Zero())
      : last_acked_packet_ack_time_(start) {}

  SentPacketRecord OnPacketSent(PacketNumber pn, ByteCount bytes, SimTime now,
                                bool app_limited = false) const {
    SentPacketRecord r;
    r.packet_number = pn;
    r.size_bytes = bytes;
    r.sent_time = now;
    r.total_byte_acked_snapshot = total_byte_acked_;
    r.last_acked_packet_ack_time_snapshot = last_acked_packet_ack_time_;
    r.is_app_limited = app_limited;
    return r;
  }

  // Returns nullopt when the elapsed interval is zero.
  std::optional<RateSample> OnPacketAcked(const SentPacketRecord& r, SimTime now) {
    last_acked_packet_ack_time_ = now;
    total_byte_acked_ += r.size_bytes;
    const Duration delta_t = now - r.last_acked_packet_ack_time_snapshot;
    if (delta_t <= Duration::Zero()) return std::nullopt;
    RateSample s;
    s.packet_number = r.packet_number;
    s.delta_delivered_bytes = total_byte_acked_ - r.total_byte_acked_snapshot;
    s.delta_t = delta_t;
    s.bw_es = Bandwidth::FromBytesAndDuration(s.delta_delivered_bytes, delta_t);
    s.rtt_sample = now - r.sent_time;
    s.is_app_limited = r.is_app_limited;
    return s;
  }

  ByteCount total_byte_acked() const { return total_byte_acked_; }
  SimTime last_acked_packet_ack_time() const { return last_acked_packet_ack_time_; }

 private:
  ByteCount total_byte_acked_ = 0;
  SimTime last_acked_packet_ack_time_;
};

// Packet-timed rounds: a round ends when a packet sent after the previous
// round's marker is acknowledged.
class RoundTripCounter {
 public:
  void OnPacketSent(PacketNumber pn) { last_sent_ = pn; }

  // True when `pn` closes the current round.
  bool OnPacketAcked(PacketNumber pn) {
    if (pn > round_end_) {
      ++count_;
      round_end_ = last_sent_;
      return true;
    }
    return false;
  }

  RoundCount count() const { return count_; }

 private:
  PacketNumber last_sent_ = 0;
  PacketNumber round_end_ = 0;
  RoundCount count_ = 0;
};

}  // namespace bbrsim

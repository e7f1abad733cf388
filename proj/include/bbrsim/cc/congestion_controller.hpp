#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bbrsim/sim/time.hpp"
#include "bbrsim/sim/units.hpp"

namespace bbrsim {

// Bandwidth sample derived from one acknowledged packet:
//   delta_delivered = total_byte_acked(now) - total_byte_acked(at send)
//   delta_t         = now - last_acked_packet_ack_time(at send)
//   bw_es           = delta_delivered / delta_t
struct RateSample {
  PacketNumber packet_number = 0;
  ByteCount delta_delivered_bytes = 0;
  Duration delta_t = Duration::Zero();
  Bandwidth bw_es = Bandwidth::Zero();
  Duration rtt_sample = Duration::Zero();
  ByteCount bytes_lost_in_round = 0;
  bool is_round_end = false;
  bool is_app_limited = false;
};

struct AckedPacket {
  PacketNumber packet_number = 0;
  ByteCount bytes = 0;
  SimTime sent_time;
};

struct LostPacket {
  PacketNumber packet_number = 0;
  ByteCount bytes = 0;
};

// Everything the transport learned from one incoming ACK (or a loss timer).
struct CongestionEvent {
  SimTime now;
  ByteCount prior_in_flight = 0;
  ByteCount bytes_in_flight = 0;
  std::vector<AckedPacket> acked;
  std::vector<LostPacket> lost;
  std::vector<RateSample> samples;
  bool is_round_end = false;
  RoundCount round = 0;
  Duration latest_rtt = Duration::Zero();
  Duration smoothed_rtt = Duration::Zero();
  Duration min_rtt = Duration::Zero();

  ByteCount bytes_acked() const {
    ByteCount n = 0;
    for (const auto& a : acked) n += a.bytes;
    return n;
  }
  ByteCount bytes_lost() const {
    ByteCount n = 0;
    for (const auto& l : lost) n += l.bytes;
    return n;
  }
};

// Contract shared by every algorithm in the suite. The transport reports
// sends and congestion events; the controller answers with a window and,
// for rate-based algorithms, a pacing rate.
class CongestionController {
 public:
  virtual ~CongestionController() = default;

  virtual std::string_view name() const = 0;

  virtual void OnPacketSent(SimTime now, PacketNumber packet_number, ByteCount bytes,
                            ByteCount bytes_in_flight) = 0;
  virtual void OnCongestionEvent(const CongestionEvent& event) = 0;
  virtual void OnRetransmissionTimeout(SimTime /*now*/) {}

  virtual ByteCount GetCongestionWindow() const = 0;
  // nullopt means the sender is purely window-clocked.
  virtual std::optional<Bandwidth> GetPacingRate() const = 0;
  // Rate reported in traces. Window-clocked senders report cwnd / srtt.
  virtual Bandwidth TraceRate(Duration smoothed_rtt) const {
    if (auto rate = GetPacingRate()) return *rate;
    if (smoothed_rtt <= Duration::Zero()) return Bandwidth::Zero();
    return Bandwidth::FromBytesAndDuration(GetCongestionWindow(), smoothed_rtt);
  }
};

}  // namespace bbrsim

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "bbrsim/sim/time.hpp"
#include "bbrsim/transport/rate_sampler.hpp"

namespace bbrsim {

// Packet- and time-threshold loss detection. Only packets older than the
// largest acknowledged packet can be declared lost.
class LossDetector {
 public:
  static constexpr PacketNumber kPacketThreshold = 3;
  static constexpr double kTimeThreshold = 9.0 / 8.0;

  static Duration LossDelay(Duration smoothed_rtt, Duration latest_rtt) {
    return std::max(smoothed_rtt, latest_rtt) * kTimeThreshold;
  }

  // Removes lost records from `unacked` and returns them in packet order.
  // `loss_time` receives the earliest moment a still-outstanding packet
  // would cross the time threshold, if any.
  static std::vector<SentPacketRecord> DetectLosses(
      std::map<PacketNumber, SentPacketRecord>& unacked, PacketNumber largest_acked,
      SimTime now, Duration smoothed_rtt, Duration latest_rtt,
      std::optional<SimTime>* loss_time = nullptr) {
    std::vector<SentPacketRecord> lost;
    if (loss_time) loss_time->reset();
    const Duration delay = LossDelay(smoothed_rtt, latest_rtt);
    for (auto it = unacked.begin(); it != unacked.end() && it->first < largest_acked;) {
      const SentPacketRecord& r = it->second;
      const bool by_count = largest_acked - r.packet_number >= kPacketThreshold;
      const bool by_time = !delay.IsZero() && now - r.sent_time >= delay;
      if (by_count || by_time) {
        lost.push_back(r);
        it = unacked.erase(it);
        continue;
      }
      if (loss_time && !delay.IsZero()) {
        const SimTime when = r.sent_time + delay;
        if (!*loss_time || when < **loss_time) *loss_time = when;
      }
      ++it;
    }
    return lost;
  }
};

}  // namespace bbrsim

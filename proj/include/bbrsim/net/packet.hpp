#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "bbrsim/sim/time.hpp"
#include "bbrsim/sim/units.hpp"

namespace bbrsim {

using FlowId = uint32_t;

// Wire sizes. The 40 byte header stands in for IP + UDP + transport header.
inline constexpr ByteCount kMaxSegmentSize = 1400;
inline constexpr ByteCount kHeaderSize = 40;
inline constexpr ByteCount kMaxPacketSize = kMaxSegmentSize + kHeaderSize;
inline constexpr ByteCount kAckPacketSize = 40;

struct StreamFrame {
  ByteCount offset = 0;
  ByteCount length = 0;
};

struct StopWaitingFrame {
  PacketNumber least_unacked = 0;
};

// Inclusive packet number interval.
struct AckRange {
  PacketNumber first = 0;
  PacketNumber last = 0;
  bool Contains(PacketNumber pn) const { return pn >= first && pn <= last; }
};

// Ranges are disjoint and sorted descending; ranges.front().last is the
// largest acked packet.
struct AckFrame {
  PacketNumber largest_acked = 0;
  Duration ack_delay = Duration::Zero();
  std::vector<AckRange> ranges;
};

using Frame = std::variant<StreamFrame, StopWaitingFrame, AckFrame>;

enum class PacketKind : uint8_t { kData, kAck };

struct Packet {
  FlowId flow_id = 0;
  PacketKind kind = PacketKind::kData;
  PacketNumber packet_number = 0;
  ByteCount size_bytes = 0;
  // Sender timestamp carried to the receiver for one-way delay.
  SimTime sent_time;
  std::vector<Frame> frames;
  // Routing state: index of the next hop on the flow's path.
  uint32_t hop = 0;

  template <typename F>
  const F* Find() const {
    for (const auto& f : frames) {
      if (const auto* p = std::get_if<F>(&f)) return p;
    }
    return nullptr;
  }
};

}  // namespace bbrsim

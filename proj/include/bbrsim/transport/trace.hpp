#pragma once

#include <functional>

#include "bbrsim/net/packet.hpp"
#include "bbrsim/sim/time.hpp"

namespace bbrsim {

enum class TraceEvent { kSend, kAck, kLoss, kOwd, kDeliver };

// value: kSend -> controller rate (B/s), kAck -> bytes acked,
//        kLoss -> bytes declared lost, kOwd -> one-way delay (ms),
//        kDeliver -> stream bytes newly handed to the application.
struct TraceRecord {
  SimTime time;
  FlowId flow = 0;
  TraceEvent event = TraceEvent::kSend;
  double value = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

}  // namespace bbrsim

#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "bbrsim/net/packet.hpp"
#include "bbrsim/sim/rng.hpp"
#include "bbrsim/sim/simulator.hpp"
#include "bbrsim/sim/units.hpp"

namespace bbrsim {

struct LinkConfig {
  double bandwidth_bps = 0;  // bits per second
  Duration prop_delay = Duration::Zero();
  ByteCount queue_limit_bytes = 0;
  double random_loss_rate = 0.0;

  void Validate() const {
    if (!(bandwidth_bps > 0)) throw std::invalid_argument("link bandwidth must be > 0");
    if (prop_delay < Duration::Zero()) throw std::invalid_argument("negative propagation delay");
    if (queue_limit_bytes < kMaxPacketSize) {
      throw std::invalid_argument("queue limit must hold at least one MTU");
    }
    if (!(random_loss_rate >= 0.0 && random_loss_rate <= 1.0)) {
      throw std::invalid_argument("random loss rate must be in [0, 1]");
    }
  }
};

// Queue limit for a rate x delay product, e.g. 5 Mbps * 100 ms = 62500 B.
inline ByteCount BytesForRateDelay(double bandwidth_bps, Duration delay) {
  return static_cast<ByteCount>(bandwidth_bps * delay.ToSeconds() / 8.0 + 0.5);
}

enum class EnqueueResult { kAccepted, kDroppedTail, kDroppedRandom };
enum class LossVerdict { kKept, kDroppedRandom };

struct LinkStats {
  uint64_t packets_in = 0;
  uint64_t packets_delivered = 0;
  uint64_t tail_drops = 0;
  uint64_t random_drops = 0;
  uint64_t bytes_in = 0;
  uint64_t bytes_out = 0;
  ByteCount max_backlog = 0;
};

// Byte-counted FIFO. The packet being serialized stays counted until its
// last bit leaves.
class DropTailQueue {
 public:
  explicit DropTailQueue(ByteCount limit_bytes) : limit_bytes_(limit_bytes) {}

  bool WouldAccept(ByteCount size) const { return backlog_bytes_ + size <= limit_bytes_; }

  bool Push(Packet packet) {
    if (!WouldAccept(packet.size_bytes)) return false;
    backlog_bytes_ += packet.size_bytes;
    fifo_.push_back(std::move(packet));
    return true;
  }

  Packet Pop() {
    Packet p = std::move(fifo_.front());
    fifo_.pop_front();
    backlog_bytes_ -= p.size_bytes;
    return p;
  }

  const Packet& Front() const { return fifo_.front(); }
  bool empty() const { return fifo_.empty(); }
  size_t size() const { return fifo_.size(); }
  ByteCount backlog_bytes() const { return backlog_bytes_; }
  ByteCount limit_bytes() const { return limit_bytes_; }

 private:
  ByteCount limit_bytes_;
  ByteCount backlog_bytes_ = 0;
  std::deque<Packet> fifo_;
};

inline LossVerdict ApplyRandomLoss(double rate, RngStream& rng) {
  if (rate <= 0.0) return LossVerdict::kKept;
  if (rate >= 1.0) return LossVerdict::kDroppedRandom;
  return rng.Bernoulli(rate) ? LossVerdict::kDroppedRandom : LossVerdict::kKept;
}

// One direction of a point-to-point link: droptail queue, serializer, and
// propagation pipe. Random loss, when configured, hits data packets at
// ingress before they reach the queue.
class Channel {
 public:
  using DeliverFn = std::function<void(Packet)>;

  Channel(Simulator& sim, std::string name, const LinkConfig& config,
          std::optional<RngStream> loss_rng = std::nullopt)
      : sim_(sim),
        name_(std::move(name)),
        rate_(Bandwidth::BitsPerSecond(config.bandwidth_bps)),
        prop_delay_(config.prop_delay),
        loss_rate_(config.random_loss_rate),
        queue_(config.queue_limit_bytes),
        loss_rng_(std::move(loss_rng)) {
    config.Validate();
    if (loss_rate_ > 0.0 && !loss_rng_) {
      throw std::invalid_argument("random loss requires an RNG stream");
    }
  }

  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  void set_deliver(DeliverFn fn) { deliver_ = std::move(fn); }

  EnqueueResult Enqueue(Packet packet) {
    if (packet.size_bytes == 0) throw std::invalid_argument("empty packet");
    ++stats_.packets_in;
    stats_.bytes_in += packet.size_bytes;
    if (packet.kind == PacketKind::kData && loss_rate_ > 0.0 &&
        ApplyRandomLoss(loss_rate_, *loss_rng_) == LossVerdict::kDroppedRandom) {
      ++stats_.random_drops;
      if (on_drop_) on_drop_(packet, EnqueueResult::kDroppedRandom);
      return EnqueueResult::kDroppedRandom;
    }
    if (!queue_.WouldAccept(packet.size_bytes)) {
      ++stats_.tail_drops;
      if (on_drop_) on_drop_(packet, EnqueueResult::kDroppedTail);
      return EnqueueResult::kDroppedTail;
    }
    queue_.Push(std::move(packet));
    if (queue_.backlog_bytes() > stats_.max_backlog) stats_.max_backlog = queue_.backlog_bytes();
    if (!busy_) StartTransmission();
    return EnqueueResult::kAccepted;
  }

  // Rate change at `at`. A packet already being serialized finishes at the
  // old rate.
  void SetBandwidth(double new_bps, SimTime at) {
    if (!(new_bps > 0)) throw std::invalid_argument("bandwidth must be > 0");
    sim_.Schedule(at, [this, new_bps] { rate_ = Bandwidth::BitsPerSecond(new_bps); });
  }

  using DropFn = std::function<void(const Packet&, EnqueueResult)>;
  void set_on_drop(DropFn fn) { on_drop_ = std::move(fn); }

  // Packets accepted but not yet delivered: queued, on the wire, or propagating.
  uint64_t packets_in_transit() const { return queue_.size() + propagating_; }

  bool ConservationHolds() const {
    return stats_.packets_in == stats_.packets_delivered + stats_.tail_drops +
                                    stats_.random_drops + packets_in_transit();
  }

  const LinkStats& stats() const { return stats_; }
  const std::string& name() const { return name_; }
  Bandwidth rate() const { return rate_; }
  Duration prop_delay() const { return prop_delay_; }
  ByteCount backlog_bytes() const { return queue_.backlog_bytes(); }
  ByteCount queue_limit_bytes() const { return queue_.limit_bytes(); }
  double random_loss_rate() const { return loss_rate_; }

 private:
  void StartTransmission() {
    busy_ = true;
    const Duration tx = rate_.TransferTime(queue_.Front().size_bytes);
    sim_.ScheduleIn(tx, [this] { OnTransmitComplete(); });
  }

  void OnTransmitComplete() {
    Packet p = queue_.Pop();
    stats_.bytes_out += p.size_bytes;
    ++propagating_;
    sim_.ScheduleIn(prop_delay_, [this, p = std::move(p)]() mutable {
      --propagating_;
      ++stats_.packets_delivered;
      if (deliver_) deliver_(std::move(p));
    });
    if (!queue_.empty()) {
      StartTransmission();
    } else {
      busy_ = false;
    }
  }

  Simulator& sim_;
  std::string name_;
  Bandwidth rate_;
  Duration prop_delay_;
  double loss_rate_;
  DropTailQueue queue_;
  std::optional<RngStream> loss_rng_;
  DeliverFn deliver_;
  DropFn on_drop_;
  bool busy_ = false;
  uint64_t propagating_ = 0;
  LinkStats stats_;
};

}  // namespace bbrsim

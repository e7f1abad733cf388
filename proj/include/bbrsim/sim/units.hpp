#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>

#include "bbrsim/sim/time.hpp"

namespace bbrsim {

using ByteCount = uint64_t;
using PacketNumber = uint64_t;
using RoundCount = uint64_t;

// Transfer rate, stored as bytes per second.
class Bandwidth {
 public:
  constexpr Bandwidth() = default;

  static constexpr Bandwidth Zero() { return Bandwidth(0.0); }
  static constexpr Bandwidth Infinite() {
    return Bandwidth(std::numeric_limits<double>::infinity());
  }
  static constexpr Bandwidth BytesPerSecond(double bps) { return Bandwidth(bps); }
  static constexpr Bandwidth BitsPerSecond(double bits) { return Bandwidth(bits / 8.0); }
  static Bandwidth FromBytesAndDuration(ByteCount bytes, Duration d) {
    if (d <= Duration::Zero()) return Infinite();
    return Bandwidth(static_cast<double>(bytes) / d.ToSeconds());
  }

  constexpr double bytes_per_second() const { return bps_; }
  constexpr double bits_per_second() const { return bps_ * 8.0; }
  constexpr bool IsZero() const { return bps_ == 0.0; }

  // Time needed to put `bytes` on the wire, rounded to the nearest microsecond.
  Duration TransferTime(ByteCount bytes) const {
    if (bps_ <= 0.0) return Duration::Infinite();
    return Duration::FromSeconds(static_cast<double>(bytes) / bps_);
  }

  // Bytes carried during `d` at this rate (truncated).
  ByteCount BytesIn(Duration d) const {
    if (d <= Duration::Zero() || bps_ <= 0.0) return 0;
    return static_cast<ByteCount>(std::llround(bps_ * d.ToSeconds()));
  }

  friend constexpr auto operator<=>(Bandwidth, Bandwidth) = default;
  friend constexpr Bandwidth operator*(Bandwidth b, double k) { return Bandwidth(b.bps_ * k); }
  friend constexpr Bandwidth operator*(double k, Bandwidth b) { return Bandwidth(b.bps_ * k); }
  friend constexpr Bandwidth operator+(Bandwidth a, Bandwidth b) { return Bandwidth(a.bps_ + b.bps_); }

  friend std::ostream& operator<<(std::ostream& os, Bandwidth b) {
    return os << b.bps_ << "B/s";
  }

 private:
  constexpr explicit Bandwidth(double bps) : bps_(bps) {}
  double bps_ = 0.0;
};

}  // namespace bbrsim

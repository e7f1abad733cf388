#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bbrsim {

// Signed span of virtual time with microsecond resolution.
class Duration {
 public:
  constexpr Duration() = default;

  static constexpr Duration Zero() { return Duration(0); }
  static constexpr Duration Infinite() {
    return Duration(std::numeric_limits<int64_t>::max());
  }
  static constexpr Duration Micros(int64_t us) { return Duration(us); }
  static constexpr Duration Millis(int64_t ms) { return Duration(ms * 1000); }
  static constexpr Duration Seconds(int64_t s) { return Duration(s * 1000000); }
  // Rounds to the nearest microsecond.
  static Duration FromSeconds(double s) {
    const double us = s * 1e6;
    if (!(us < 9.2e18 && us > -9.2e18)) {
      throw std::overflow_error("Duration::FromSeconds out of range");
    }
    return Duration(static_cast<int64_t>(us >= 0 ? us + 0.5 : us - 0.5));
  }

  constexpr int64_t micros() const { return us_; }
  constexpr double ToSeconds() const { return static_cast<double>(us_) * 1e-6; }
  constexpr double ToMillis() const { return static_cast<double>(us_) * 1e-3; }
  constexpr bool IsZero() const { return us_ == 0; }
  constexpr bool IsInfinite() const { return *this == Infinite(); }

  friend constexpr auto operator<=>(Duration, Duration) = default;

  friend Duration operator+(Duration a, Duration b) {
    int64_t out = 0;
    if (__builtin_add_overflow(a.us_, b.us_, &out)) {
      throw std::overflow_error("Duration addition overflow");
    }
    return Duration(out);
  }
  friend Duration operator-(Duration a, Duration b) {
    int64_t out = 0;
    if (__builtin_sub_overflow(a.us_, b.us_, &out)) {
      throw std::overflow_error("Duration subtraction overflow");
    }
    return Duration(out);
  }
  friend Duration operator*(Duration d, int64_t k) {
    int64_t out = 0;
    if (__builtin_mul_overflow(d.us_, k, &out)) {
      throw std::overflow_error("Duration multiplication overflow");
    }
    return Duration(out);
  }
  friend Duration operator*(int64_t k, Duration d) { return d * k; }
  // Scaled spans round to the nearest microsecond.
  friend Duration operator*(Duration d, double k) {
    return FromSeconds(d.ToSeconds() * k);
  }

  friend std::ostream& operator<<(std::ostream& os, Duration d) {
    return os << d.us_ << "us";
  }

 private:
  constexpr explicit Duration(int64_t us) : us_(us) {}
  int64_t us_ = 0;
};

// Point on the simulation clock: microseconds since simulation start.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime Zero() { return SimTime(0); }
  static constexpr SimTime Micros(uint64_t us) { return SimTime(us); }
  static constexpr SimTime Millis(uint64_t ms) { return SimTime(ms * 1000); }
  static constexpr SimTime Seconds(uint64_t s) { return SimTime(s * 1000000); }
  static SimTime FromSeconds(double s) {
    if (!(s >= 0)) throw std::invalid_argument("SimTime cannot be negative");
    return Zero() + Duration::FromSeconds(s);
  }

  constexpr uint64_t micros() const { return us_; }
  constexpr double ToSeconds() const { return static_cast<double>(us_) * 1e-6; }

  friend constexpr auto operator<=>(SimTime, SimTime) = default;

  friend SimTime operator+(SimTime t, Duration d) {
    const int64_t delta = d.micros();
    if (delta >= 0) {
      if (static_cast<uint64_t>(delta) >
          std::numeric_limits<uint64_t>::max() - t.us_) {
        throw std::overflow_error("SimTime overflow");
      }
      return SimTime(t.us_ + static_cast<uint64_t>(delta));
    }
    const uint64_t back = static_cast<uint64_t>(-(delta + 1)) + 1;
    if (back > t.us_) throw std::underflow_error("SimTime before zero");
    return SimTime(t.us_ - back);
  }
  friend SimTime operator-(SimTime t, Duration d) {
    return t + (Duration::Zero() - d);
  }
  friend Duration operator-(SimTime a, SimTime b) {
    if (a.us_ >= b.us_) {
      const uint64_t diff = a.us_ - b.us_;
      if (diff > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
        throw std::overflow_error("SimTime difference overflow");
      }
      return Duration::Micros(static_cast<int64_t>(diff));
    }
    const uint64_t diff = b.us_ - a.us_;
    if (diff > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
      throw std::overflow_error("SimTime difference overflow");
    }
    return Duration::Micros(-static_cast<int64_t>(diff));
  }

  friend std::ostream& operator<<(std::ostream& os, SimTime t) {
    return os << t.ToSeconds() << "s";
  }

 private:
  constexpr explicit SimTime(uint64_t us) : us_(us) {}
  uint64_t us_ = 0;
};

}  // namespace bbrsim

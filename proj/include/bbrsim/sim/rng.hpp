#pragma once

#include <cstdint>
#include <random>

namespace bbrsim {

// Stream identifiers. One stream per stochastic consumer, so adding a
// consumer never shifts another consumer's sequence.
enum class StreamId : uint32_t {
  kBottleneckLoss = 1,
  kGainCycle = 2,       // per-flow offset: kGainCycle + 16 * flow index
  kCruiseInterval = 3,  // per-flow offset: kCruiseInterval + 16 * flow index
  kSendJitter = 4,      // per-flow offset: kSendJitter + 16 * flow index
};

inline uint32_t FlowStream(StreamId base, uint32_t flow_index) {
  return static_cast<uint32_t>(base) + 16u * flow_index;
}

// Reproducible random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the seed for (seed, stream_id) is
// derived with SplitMix64. Floating-point draws use the top 53 bits, so no
// implementation-defined distribution is involved.
class RngStream {
 public:
  RngStream(uint64_t seed, uint32_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(DeriveSeed(seed, stream_id)) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1).
  double NextDouble() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * NextDouble(); }

  bool Bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return NextDouble() < p;
  }

  uint64_t seed() const { return seed_; }
  uint32_t stream_id() const { return stream_id_; }

  static uint64_t SplitMix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static uint64_t DeriveSeed(uint64_t seed, uint32_t stream_id) {
    return SplitMix64(SplitMix64(seed) ^ SplitMix64(0x5bd1e995ULL + stream_id));
  }

 private:
  uint64_t seed_;
  uint32_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace bbrsim

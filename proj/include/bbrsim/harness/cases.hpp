#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace bbrsim::harness {

// Bottleneck row: rate, one-way propagation delay and a queue given as the
// rate times a delay.
struct CaseRow {
  int id;
  double bandwidth_mbps;
  int prop_delay_ms;
  int queue_delay_ms;

  double bandwidth_bps() const { return bandwidth_mbps * 1e6; }
  unsigned long long queue_bytes() const {
    return static_cast<unsigned long long>(bandwidth_bps() * queue_delay_ms / 1000.0 / 8.0 + 0.5);
  }
};

inline constexpr std::array<CaseRow, 11> kIntraFairnessCases{{
    {1, 5, 50, 100},
    {2, 5, 50, 150},
    {3, 5, 50, 200},
    {4, 6, 50, 100},
    {5, 6, 50, 150},
    {6, 7, 50, 150},
    {7, 7, 100, 300},
    {8, 8, 100, 200},
    {9, 8, 100, 300},
    {10, 10, 50, 150},
    {11, 10, 50, 200},
}};

inline constexpr std::array<CaseRow, 9> kRttUnfairnessCases{{
    {1, 4, 10, 150},
    {2, 4, 20, 180},
    {3, 4, 30, 210},
    {4, 6, 10, 150},
    {5, 6, 20, 180},
    {6, 6, 30, 210},
    {7, 8, 10, 150},
    {8, 8, 20, 180},
    {9, 8, 30, 210},
}};

inline constexpr std::array<CaseRow, 9> kInterProtocolCases{{
    {1, 4, 50, 100},
    {2, 4, 50, 150},
    {3, 4, 50, 200},
    {4, 6, 50, 100},
    {5, 6, 50, 150},
    {6, 6, 50, 200},
    {7, 8, 50, 150},
    {8, 10, 50, 150},
    {9, 12, 50, 150},
}};

// Utilization reuses intra-fairness rows.
inline constexpr std::array<int, 5> kUtilizationCases{2, 5, 7, 9, 10};
inline constexpr std::array<double, 4> kUtilizationLossRates{0.0, 0.01, 0.03, 0.05};

template <size_t N>
const CaseRow& FindCase(const std::array<CaseRow, N>& table, int id, const char* what) {
  for (const CaseRow& r : table) {
    if (r.id == id) return r;
  }
  throw std::invalid_argument(std::string("unknown ") + what + " case " + std::to_string(id));
}

}  // namespace bbrsim::harness

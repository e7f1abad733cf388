#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bbrsim::metrics {

// bytes / duration.
inline double AverageRate(double bytes, double duration_s) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("AverageRate: duration must be positive");
  return bytes / duration_s;
}

// (sum x)^2 / (n * sum x^2).
inline double JainIndex(const std::vector<double>& rates) {
  if (rates.empty()) throw std::invalid_argument("JainIndex: no rates");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double x : rates) {
    if (x < 0.0) throw std::invalid_argument("JainIndex: negative rate");
    sum += x;
    sum_sq += x * x;
  }
  if (sum_sq == 0.0) throw std::invalid_argument("JainIndex: all rates zero");
  return sum * sum / (static_cast<double>(rates.size()) * sum_sq);
}

// max / min.
inline double MaxMinRatio(const std::vector<double>& rates) {
  if (rates.empty()) throw std::invalid_argument("MaxMinRatio: no rates");
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  if (!(*lo > 0.0)) throw std::invalid_argument("MaxMinRatio: zero minimum");
  return *hi / *lo;
}

// sum(bytes_i) * 8 / (cap * duration). `capacity_bit_seconds` is the
// capacity integrated over the run, so a time-varying link is handled by
// passing the integral rather than cap * duration.
inline double ChannelUtilization(double total_app_bytes, double capacity_bit_seconds) {
  if (!(capacity_bit_seconds > 0.0)) throw std::invalid_argument("ChannelUtilization: no capacity");
  return total_app_bytes * 8.0 / capacity_bit_seconds;
}

inline double ChannelUtilization(double total_app_bytes, double cap_bps, double duration_s) {
  return ChannelUtilization(total_app_bytes, cap_bps * duration_s);
}

// Unweighted mean of per-flow means.
inline double MeanOfMeans(const std::vector<double>& per_flow) {
  if (per_flow.empty()) throw std::invalid_argument("MeanOfMeans: no samples");
  return std::accumulate(per_flow.begin(), per_flow.end(), 0.0) / static_cast<double>(per_flow.size());
}

inline double LossRate(double lost, double sent) {
  if (!(sent > 0.0)) return 0.0;
  return lost / sent;
}

}  // namespace bbrsim::metrics

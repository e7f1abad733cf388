#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bbrsim/metrics/recorder.hpp"

namespace bbrsim::metrics {

inline constexpr const char* kRatesHeader = "time_s,flow_id,rate_bps";
inline constexpr const char* kOwdHeader = "time_s,flow_id,owd_ms";
inline constexpr const char* kSummaryHeader =
    "scenario,case,algo,flow_id,avg_rate_bps,jain,ratio,util,mean_owd_ms,loss_rate";

inline std::string Fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline std::string Fmt(const char* spec, const std::optional<double>& v) {
  return v ? Fmt(spec, *v) : std::string();
}

// Per-flow rows carry only the flow's own figures; the "all" row carries the
// scenario-level ones.
struct SummaryRow {
  std::string scenario;
  std::string case_id;
  std::string algo;
  std::string flow_id;
  double avg_rate_bps = 0.0;
  std::optional<double> jain;
  std::optional<double> ratio;
  std::optional<double> util;
  double mean_owd_ms = 0.0;
  double loss_rate = 0.0;
};

namespace internal {

template <typename ValueFn>
void WriteBinned(std::ostream& os, const char* header, const Recorder& rec,
                 const std::vector<Bin> Recorder::FlowSeries::*series, const char* spec, ValueFn value) {
  os << header << '\n';
  size_t max_bins = 0;
  for (const auto& [_, f] : rec.flows()) max_bins = std::max(max_bins, (f.*series).size());
  for (size_t i = 0; i < max_bins; ++i) {
    const std::string t = Fmt("%.1f", static_cast<double>(i) * kBinWidth.ToSeconds());
    for (const auto& [id, f] : rec.flows()) {
      const auto& bins = f.*series;
      if (i >= bins.size() || bins[i].count == 0) continue;
      os << t << ',' << id << ',' << Fmt(spec, value(bins[i])) << '\n';
    }
  }
}

}  // namespace internal

inline void WriteRatesCsv(std::ostream& os, const Recorder& rec) {
  internal::WriteBinned(os, kRatesHeader, rec, &Recorder::FlowSeries::rate, "%.0f",
                        [](const Bin& b) { return b.mean() * 8.0; });
}

inline void WriteOwdCsv(std::ostream& os, const Recorder& rec) {
  internal::WriteBinned(os, kOwdHeader, rec, &Recorder::FlowSeries::owd, "%.3f",
                        [](const Bin& b) { return b.mean(); });
}

inline void WriteSummaryCsv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    os << r.scenario << ',' << r.case_id << ',' << r.algo << ',' << r.flow_id << ','
       << Fmt("%.1f", r.avg_rate_bps) << ',' << Fmt("%.6f", r.jain) << ',' << Fmt("%.6f", r.ratio)
       << ',' << Fmt("%.6f", r.util) << ',' << Fmt("%.3f", r.mean_owd_ms) << ','
       << Fmt("%.6f", r.loss_rate) << '\n';
  }
}

}  // namespace bbrsim::metrics

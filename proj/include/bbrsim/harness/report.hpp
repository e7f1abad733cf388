#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbrsim/metrics/csv.hpp"

namespace bbrsim::harness {

namespace internal {

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::optional<double> OptionalNumber(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace internal

inline std::vector<metrics::SummaryRow> ReadSummaryCsv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || internal::SplitCsvLine(line) != internal::SplitCsvLine(metrics::kSummaryHeader)) {
    throw std::runtime_error("not a summary.csv (header mismatch)");
  }
  std::vector<metrics::SummaryRow> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = internal::SplitCsvLine(line);
    if (f.size() != 10) throw std::runtime_error("summary.csv: expected 10 fields in: " + line);
    metrics::SummaryRow r;
    r.scenario = f[0];
    r.case_id = f[1];
    r.algo = f[2];
    r.flow_id = f[3];
    r.avg_rate_bps = std::stod(f[4]);
    r.jain = internal::OptionalNumber(f[5]);
    r.ratio = internal::OptionalNumber(f[6]);
    r.util = internal::OptionalNumber(f[7]);
    r.mean_owd_ms = std::stod(f[8]);
    r.loss_rate = std::stod(f[9]);
    rows.push_back(r);
  }
  return rows;
}

// Every summary.csv below `root`, in path order.
inline std::vector<metrics::SummaryRow> CollectSummaries(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) throw std::runtime_error("not a directory: " + root.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() == "summary.csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<metrics::SummaryRow> all;
  for (const auto& p : files) {
    std::ifstream is(p);
    auto rows = ReadSummaryCsv(is);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return all;
}

// Seed-averaged figures for one (scenario, case, algo).
struct CellStats {
  int runs = 0;
  std::map<std::string, double> flow_rate_bps;  // flow_id -> mean over runs
  double jain = 0.0;
  double ratio = 0.0;
  double util = 0.0;
  double mean_owd_ms = 0.0;
  double loss_rate = 0.0;
};

struct Report {
  // scenario -> case label -> algo -> stats
  std::map<std::string, std::map<std::string, std::map<std::string, CellStats>>> cells;
};

inline Report Aggregate(const std::vector<metrics::SummaryRow>& rows) {
  Report rep;
  // Flow rows precede their "all" row; accumulate sums, then divide.
  for (const auto& r : rows) {
    CellStats& c = rep.cells[r.scenario][r.case_id][r.algo];
    if (r.flow_id == "all") {
      ++c.runs;
      c.jain += r.jain.value_or(0.0);
      c.ratio += r.ratio.value_or(0.0);
      c.util += r.util.value_or(0.0);
      c.mean_owd_ms += r.mean_owd_ms;
      c.loss_rate += r.loss_rate;
    } else {
      c.flow_rate_bps[r.flow_id] += r.avg_rate_bps;
    }
  }
  for (auto& [_, cases] : rep.cells) {
    for (auto& [_, algos] : cases) {
      for (auto& [_, c] : algos) {
        if (c.runs == 0) continue;
        const double n = c.runs;
        for (auto& [_, v] : c.flow_rate_bps) v /= n;
        c.jain /= n;
        c.ratio /= n;
        c.util /= n;
        c.mean_owd_ms /= n;
        c.loss_rate /= n;
      }
    }
  }
  return rep;
}

namespace internal {

inline std::string Num(const char* spec, double v) { return metrics::Fmt(spec, v); }

// Numeric-aware ordering so case "10" follows "9" and "C10_loss0" follows "C9_loss0".
inline bool CaseLess(const std::string& a, const std::string& b) {
  auto key = [](const std::string& s) {
    std::string digits;
    size_t i = 0;
    while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) digits.push_back(s[i++]);
    return std::make_pair(digits.empty() ? 0 : std::stoi(digits), s);
  };
  return key(a) < key(b);
}

inline void PrintTable(std::ostream& os, const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> w(header.size(), 0);
  for (size_t i = 0; i < header.size(); ++i) w[i] = header[i].size();
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size() && i < w.size(); ++i) w[i] = std::max(w[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    os << '|';
    for (size_t i = 0; i < w.size(); ++i) {
      const std::string& c = i < cells.size() ? cells[i] : std::string();
      os << ' ' << c << std::string(w[i] - c.size(), ' ') << " |";
    }
    os << '\n';
  };
  line(header);
  os << '|';
  for (size_t x : w) os << std::string(x + 2, '-') << '|';
  os << '\n';
  for (const auto& r : rows) line(r);
}

inline std::string FlowRateKbps(const CellStats& c, const std::string& flow) {
  auto it = c.flow_rate_bps.find(flow);
  return it == c.flow_rate_bps.end() ? "-" : Num("%.0f", it->second / 1000.0);
}

}  // namespace internal

// One table per scenario. Columns are cases, rows algorithms; the cell holds
// the figures the scenario is judged by:
//   rtt_unfairness  x1 (kbps), x2 (kbps), jain, ratio
//   inter_protocol  jain, ratio
//   intra_fairness  jain, mean owd (ms), loss
//   utilization     utilization, with one row per (algo, loss)
//   responsiveness  loss, mean owd (ms), utilization
inline void WriteReport(std::ostream& os, const Report& rep) {
  using internal::Num;
  for (const auto& [scenario, cases] : rep.cells) {
    os << "## " << scenario << "\n\n";
    std::set<std::string> algos;
    for (const auto& [_, by_algo] : cases) {
      for (const auto& [a, _] : by_algo) algos.insert(a);
    }
    if (scenario == "responsiveness") {
      std::vector<std::vector<std::string>> rows;
      for (const auto& [_, by_algo] : cases) {
        for (const auto& [a, c] : by_algo) {
          rows.push_back({a, Num("%.4f", c.loss_rate), Num("%.2f", c.mean_owd_ms), Num("%.3f", c.util)});
        }
      }
      internal::PrintTable(os, {"algo", "loss", "owd_ms", "util"}, rows);
      os << '\n';
      continue;
    }
    if (scenario == "utilization") {
      // Case labels look like C7_loss0.05.
      std::set<std::string, decltype(&internal::CaseLess)> ids(&internal::CaseLess);
      std::set<double> losses;
      std::map<std::string, std::map<double, std::map<std::string, double>>> util;  // algo, loss, case
      for (const auto& [label, by_algo] : cases) {
        const auto pos = label.find("_loss");
        const std::string id = label.substr(0, pos);
        const double loss = pos == std::string::npos ? 0.0 : std::stod(label.substr(pos + 5));
        ids.insert(id);
        losses.insert(loss);
        for (const auto& [a, c] : by_algo) util[a][loss][id] = c.util;
      }
      std::vector<std::string> header{"algo", "loss"};
      header.insert(header.end(), ids.begin(), ids.end());
      std::vector<std::vector<std::string>> rows;
      for (const auto& [a, by_loss] : util) {
        for (const auto& [loss, by_case] : by_loss) {
          std::vector<std::string> row{a, Num("%g", loss)};
          for (const auto& id : ids) {
            auto it = by_case.find(id);
            row.push_back(it == by_case.end() ? "-" : Num("%.2f", it->second));
          }
          rows.push_back(row);
        }
      }
      internal::PrintTable(os, header, rows);
      os << '\n';
      continue;
    }
    std::vector<std::string> ids;
    for (const auto& [label, _] : cases) ids.push_back(label);
    std::sort(ids.begin(), ids.end(), internal::CaseLess);
    std::vector<std::string> header{"algo"};
    header.insert(header.end(), ids.begin(), ids.end());
    std::vector<std::vector<std::string>> rows;
    for (const std::string& a : algos) {
      std::vector<std::string> row{a};
      for (const std::string& id : ids) {
        auto it = cases.at(id).find(a);
        if (it == cases.at(id).end()) {
          row.push_back("-");
          continue;
        }
        const CellStats& c = it->second;
        if (scenario == "rtt_unfairness") {
          row.push_back(internal::FlowRateKbps(c, "1") + ", " + internal::FlowRateKbps(c, "2") + ", " +
                        Num("%.2f", c.jain) + ", " + Num("%.2f", c.ratio));
        } else if (scenario == "inter_protocol") {
          row.push_back(Num("%.2f", c.jain) + ", " + Num("%.2f", c.ratio));
        } else {
          row.push_back(Num("%.2f", c.jain) + ", " + Num("%.1f", c.mean_owd_ms) + ", " + Num("%.4f", c.loss_rate));
        }
      }
      rows.push_back(row);
    }
    internal::PrintTable(os, header, rows);
    os << '\n';
  }
}

}  // namespace bbrsim::harness

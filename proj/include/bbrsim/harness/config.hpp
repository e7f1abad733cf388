#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbrsim/cc/factory.hpp"
#include "bbrsim/harness/cases.hpp"

namespace bbrsim::harness {

// Thrown for anything wrong with a requested experiment; the CLI maps it to
// exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Scenario { kIntraFairness, kRttUnfairness, kUtilization, kResponsiveness, kInterProtocol };

inline constexpr std::array<Scenario, 5> kAllScenarios{
    Scenario::kIntraFairness, Scenario::kRttUnfairness, Scenario::kUtilization,
    Scenario::kResponsiveness, Scenario::kInterProtocol};

inline std::string ScenarioName(Scenario s) {
  switch (s) {
    case Scenario::kIntraFairness: return "intra_fairness";
    case Scenario::kRttUnfairness: return "rtt_unfairness";
    case Scenario::kUtilization: return "utilization";
    case Scenario::kResponsiveness: return "responsiveness";
    case Scenario::kInterProtocol: return "inter_protocol";
  }
  return "?";
}

inline Scenario ParseScenario(const std::string& name) {
  for (Scenario s : kAllScenarios) {
    if (ScenarioName(s) == name) return s;
  }
  throw ConfigError("unknown scenario: " + name);
}

struct FlowSpec {
  uint32_t id = 0;
  std::string algo;
  double start_s = 0.0;
  double stop_s = 0.0;
  std::vector<std::string> path{"l2"};
};

struct SideLink {
  double bandwidth_bps = 100e6;
  double prop_delay_ms = 0.0;
  uint64_t queue_bytes = 0;
};

struct CapacityStep {
  double at_s = 0.0;
  double bandwidth_bps = 0.0;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::kIntraFairness;
  int case_id = 1;
  std::string algo = "bbr";
  double loss = 0.0;
  uint64_t seed = 1;
  double duration_s = 0.0;

  double bandwidth_bps = 0.0;
  double prop_delay_ms = 0.0;
  uint64_t queue_bytes = 0;
  std::map<std::string, SideLink> side_links;
  std::vector<CapacityStep> capacity;  // empty: constant bandwidth_bps
  std::vector<FlowSpec> flows;

  bool rtprop_compensation = false;
  double lambda = 1.0;
  // Host send jitter for window-clocked senders (reno, cubic).
  double send_jitter_ms = 1.0;

  // Case label used in summary.csv and directory names.
  std::string CaseLabel() const {
    if (scenario == Scenario::kUtilization) {
      std::ostringstream os;
      os << 'C' << case_id << "_loss" << loss;
      return os.str();
    }
    return std::to_string(case_id);
  }

  // Bottleneck capacity integrated over the run, in bit-seconds.
  double CapacityBitSeconds() const {
    if (capacity.empty()) return bandwidth_bps * duration_s;
    double total = 0.0;
    for (size_t i = 0; i < capacity.size(); ++i) {
      const double from = capacity[i].at_s;
      const double to = i + 1 < capacity.size() ? capacity[i + 1].at_s : duration_s;
      if (from >= duration_s) break;
      total += capacity[i].bandwidth_bps * (std::min(to, duration_s) - from);
    }
    return total;
  }

  void Validate() const {
    if (!(duration_s > 0.0)) throw ConfigError("duration must be positive");
    if (!(bandwidth_bps > 0.0)) throw ConfigError("bottleneck bandwidth must be positive");
    if (prop_delay_ms < 0.0) throw ConfigError("negative propagation delay");
    if (queue_bytes == 0) throw ConfigError("bottleneck queue must be positive");
    if (loss < 0.0 || loss >= 1.0) throw ConfigError("loss must be in [0, 1)");
    if (send_jitter_ms < 0.0) throw ConfigError("negative send jitter");
    if (flows.empty()) throw ConfigError("no flows");
    for (const FlowSpec& f : flows) {
      if (!IsKnownAlgorithm(f.algo)) throw ConfigError("unknown algorithm: " + f.algo);
      if (f.start_s < 0.0 || !(f.stop_s > f.start_s)) throw ConfigError("bad flow schedule");
      if (f.stop_s > duration_s) throw ConfigError("flow stops after the end of the run");
    }
    for (size_t i = 0; i < capacity.size(); ++i) {
      if (!(capacity[i].bandwidth_bps > 0.0)) throw ConfigError("capacity step must be positive");
      if (i == 0 && capacity[i].at_s != 0.0) throw ConfigError("capacity schedule must start at 0");
      if (i > 0 && !(capacity[i].at_s > capacity[i - 1].at_s)) {
        throw ConfigError("capacity schedule times must increase");
      }
    }
  }
};

inline constexpr double kRttSideLinkBps = 100e6;
inline constexpr double kResponsivenessHighBps = 4e6;
inline constexpr double kResponsivenessLowBps = 1e6;
inline constexpr double kResponsivenessPeriodS = 50.0;

inline std::vector<CapacityStep> AlternatingSchedule(double high_bps, double low_bps, double period_s,
                                                     double duration_s) {
  std::vector<CapacityStep> steps;
  bool high = true;
  for (double t = 0.0; t < duration_s; t += period_s, high = !high) {
    steps.push_back({t, high ? high_bps : low_bps});
  }
  return steps;
}

inline void SetBottleneck(ExperimentConfig& c, const CaseRow& row) {
  c.bandwidth_bps = row.bandwidth_bps();
  c.prop_delay_ms = row.prop_delay_ms;
  c.queue_bytes = row.queue_bytes();
}

inline void AddStaggeredFlows(ExperimentConfig& c, const std::vector<std::string>& algos) {
  for (size_t i = 0; i < algos.size(); ++i) {
    c.flows.push_back({static_cast<uint32_t>(i), algos[i], 0.1 * static_cast<double>(i), c.duration_s, {"l2"}});
  }
}

// Resolved configuration for one run of a scenario.
inline ExperimentConfig MakeExperiment(Scenario scenario, int case_id, const std::string& algo,
                                       double loss = 0.0, uint64_t seed = 1) {
  if (!IsKnownAlgorithm(algo)) throw ConfigError("unknown algorithm: " + algo);
  ExperimentConfig c;
  c.scenario = scenario;
  c.case_id = case_id;
  c.algo = algo;
  c.seed = seed;
  if (loss != 0.0 && scenario != Scenario::kUtilization) {
    throw ConfigError("random loss applies to the utilization scenario only");
  }
  c.loss = loss;
  try {
    switch (scenario) {
      case Scenario::kIntraFairness: {
        SetBottleneck(c, FindCase(kIntraFairnessCases, case_id, "intra_fairness"));
        c.duration_s = 400.0;
        const double sched[4][2] = {{0, 400}, {40, 400}, {80, 200}, {120, 300}};
        for (uint32_t i = 0; i < 4; ++i) c.flows.push_back({i, algo, sched[i][0], sched[i][1], {"l2"}});
        break;
      }
      case Scenario::kRttUnfairness: {
        const CaseRow& row = FindCase(kRttUnfairnessCases, case_id, "rtt_unfairness");
        SetBottleneck(c, row);
        c.duration_s = 200.0;
        const auto side_queue = static_cast<uint64_t>(kRttSideLinkBps * row.queue_delay_ms / 1000.0 / 8.0 + 0.5);
        c.side_links["l1"] = {kRttSideLinkBps, 10.0, side_queue};
        c.side_links["l4"] = {kRttSideLinkBps, 10.0, side_queue};
        c.side_links["l3"] = {kRttSideLinkBps, 20.0, side_queue};
        c.side_links["l5"] = {kRttSideLinkBps, 20.0, side_queue};
        c.flows.push_back({0, algo, 0.0, c.duration_s, {"l1", "l2", "l4"}});
        c.flows.push_back({1, algo, 0.0, c.duration_s, {"l3", "l2", "l5"}});
        break;
      }
      case Scenario::kUtilization: {
        bool listed = false;
        for (int id : kUtilizationCases) listed |= id == case_id;
        if (!listed) throw ConfigError("unknown utilization case " + std::to_string(case_id));
        SetBottleneck(c, FindCase(kIntraFairnessCases, case_id, "utilization"));
        // 1.5 * bandwidth * round-trip propagation delay.
        c.queue_bytes = static_cast<uint64_t>(1.5 * c.bandwidth_bps * 2.0 * c.prop_delay_ms / 1000.0 / 8.0 + 0.5);
        c.duration_s = 200.0;
        AddStaggeredFlows(c, {algo, algo, algo, algo});
        break;
      }
      case Scenario::kResponsiveness: {
        if (case_id != 1) throw ConfigError("responsiveness has a single case (1)");
        c.duration_s = 400.0;
        c.bandwidth_bps = kResponsivenessHighBps;
        c.prop_delay_ms = 50.0;
        c.queue_bytes = static_cast<uint64_t>(1.5 * kResponsivenessHighBps * 0.1 / 8.0 + 0.5);
        c.capacity = AlternatingSchedule(kResponsivenessHighBps, kResponsivenessLowBps,
                                         kResponsivenessPeriodS, c.duration_s);
        AddStaggeredFlows(c, {algo, algo});
        break;
      }
      case Scenario::kInterProtocol: {
        SetBottleneck(c, FindCase(kInterProtocolCases, case_id, "inter_protocol"));
        c.duration_s = 200.0;
        AddStaggeredFlows(c, {algo, algo, "cubic", "cubic"});
        break;
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

// Cases run by `sweep` for a scenario.
inline std::vector<int> ScenarioCases(Scenario s) {
  std::vector<int> ids;
  switch (s) {
    case Scenario::kIntraFairness:
      for (const auto& r : kIntraFairnessCases) ids.push_back(r.id);
      break;
    case Scenario::kRttUnfairness:
      for (const auto& r : kRttUnfairnessCases) ids.push_back(r.id);
      break;
    case Scenario::kUtilization:
      ids.assign(kUtilizationCases.begin(), kUtilizationCases.end());
      break;
    case Scenario::kResponsiveness:
      ids.push_back(1);
      break;
    case Scenario::kInterProtocol:
      for (const auto& r : kInterProtocolCases) ids.push_back(r.id);
      break;
  }
  return ids;
}

// ---- INI form ----
//
// [experiment]  scenario, case, algo, loss, seed, duration_s
// [bottleneck]  bandwidth_bps, prop_delay_ms, queue_bytes
// [capacity]    schedule = "t0:bps t1:bps ..."
// [bbr]         rtprop_compensation, lambda
// [transport]   send_jitter_ms
// [flowN]       algo, start_s, stop_s, path = "l1,l2,l4"
// [linkX]       bandwidth_bps, prop_delay_ms, queue_bytes   (X in 1,3,4,5)

namespace internal {

inline std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '\t') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::string Join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(sep);
    out += v[i];
  }
  return out;
}

inline std::string ScheduleToString(const std::vector<CapacityStep>& steps) {
  std::ostringstream os;
  os.precision(12);
  for (size_t i = 0; i < steps.size(); ++i) {
    if (i) os << ' ';
    os << steps[i].at_s << ':' << steps[i].bandwidth_bps;
  }
  return os.str();
}

inline std::vector<CapacityStep> ParseSchedule(const std::string& text) {
  std::vector<CapacityStep> steps;
  std::istringstream is(text);
  std::string item;
  while (is >> item) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("capacity step needs time:bps, got " + item);
    try {
      steps.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    } catch (const std::logic_error&) {
      throw ConfigError("bad capacity step: " + item);
    }
  }
  return steps;
}

// Like ptree::get with a default, but a present value that does not parse
// is an error rather than silently replaced by the default.
template <typename T>
T GetOr(const boost::property_tree::ptree& pt, const std::string& path, const T& fallback) {
  if (!pt.get_child_optional(path)) return fallback;
  return pt.get<T>(path);
}

}  // namespace internal

inline boost::property_tree::ptree ToPtree(const ExperimentConfig& c) {
  boost::property_tree::ptree pt;
  pt.put("experiment.scenario", ScenarioName(c.scenario));
  pt.put("experiment.case", c.case_id);
  pt.put("experiment.algo", c.algo);
  pt.put("experiment.loss", c.loss);
  pt.put("experiment.seed", c.seed);
  pt.put("experiment.duration_s", c.duration_s);
  pt.put("bottleneck.bandwidth_bps", c.bandwidth_bps);
  pt.put("bottleneck.prop_delay_ms", c.prop_delay_ms);
  pt.put("bottleneck.queue_bytes", c.queue_bytes);
  if (!c.capacity.empty()) pt.put("capacity.schedule", internal::ScheduleToString(c.capacity));
  pt.put("bbr.rtprop_compensation", c.rtprop_compensation);
  pt.put("bbr.lambda", c.lambda);
  pt.put("transport.send_jitter_ms", c.send_jitter_ms);
  for (const auto& [name, l] : c.side_links) {
    const std::string sec = "link" + name.substr(1);
    pt.put(sec + ".bandwidth_bps", l.bandwidth_bps);
    pt.put(sec + ".prop_delay_ms", l.prop_delay_ms);
    pt.put(sec + ".queue_bytes", l.queue_bytes);
  }
  for (const FlowSpec& f : c.flows) {
    const std::string sec = "flow" + std::to_string(f.id + 1);
    pt.put(sec + ".algo", f.algo);
    pt.put(sec + ".start_s", f.start_s);
    pt.put(sec + ".stop_s", f.stop_s);
    pt.put(sec + ".path", internal::Join(f.path, ','));
  }
  return pt;
}

inline void WriteIni(std::ostream& os, const ExperimentConfig& c) {
  boost::property_tree::write_ini(os, ToPtree(c));
}

// Builds the scenario defaults named in [experiment], then applies every
// other key present as an override.
inline ExperimentConfig FromPtree(const boost::property_tree::ptree& pt) {
  using boost::property_tree::ptree;
  try {
    const auto scenario = ParseScenario(pt.get<std::string>("experiment.scenario"));
    ExperimentConfig c = MakeExperiment(scenario, internal::GetOr<int>(pt, "experiment.case", 1),
                                        internal::GetOr<std::string>(pt, "experiment.algo", "bbr"),
                                        internal::GetOr<double>(pt, "experiment.loss", 0.0),
                                        internal::GetOr<uint64_t>(pt, "experiment.seed", 1));
    c.duration_s = internal::GetOr<double>(pt, "experiment.duration_s", c.duration_s);
    c.bandwidth_bps = internal::GetOr<double>(pt, "bottleneck.bandwidth_bps", c.bandwidth_bps);
    c.prop_delay_ms = internal::GetOr<double>(pt, "bottleneck.prop_delay_ms", c.prop_delay_ms);
    c.queue_bytes = internal::GetOr<uint64_t>(pt, "bottleneck.queue_bytes", c.queue_bytes);
    if (auto s = pt.get_optional<std::string>("capacity.schedule")) c.capacity = internal::ParseSchedule(*s);
    c.rtprop_compensation = internal::GetOr<bool>(pt, "bbr.rtprop_compensation", c.rtprop_compensation);
    c.lambda = internal::GetOr<double>(pt, "bbr.lambda", c.lambda);
    c.send_jitter_ms = internal::GetOr<double>(pt, "transport.send_jitter_ms", c.send_jitter_ms);
    for (const char* n : {"1", "3", "4", "5"}) {
      const std::string sec = std::string("link") + n;
      if (auto node = pt.get_child_optional(sec)) {
        SideLink& l = c.side_links["l" + std::string(n)];
        l.bandwidth_bps = internal::GetOr<double>(*node, "bandwidth_bps", l.bandwidth_bps);
        l.prop_delay_ms = internal::GetOr<double>(*node, "prop_delay_ms", l.prop_delay_ms);
        l.queue_bytes = internal::GetOr<uint64_t>(*node, "queue_bytes", l.queue_bytes);
      }
    }
    for (FlowSpec& f : c.flows) {
      if (auto node = pt.get_child_optional("flow" + std::to_string(f.id + 1))) {
        f.algo = internal::GetOr<std::string>(*node, "algo", f.algo);
        f.start_s = internal::GetOr<double>(*node, "start_s", f.start_s);
        f.stop_s = internal::GetOr<double>(*node, "stop_s", f.stop_s);
        if (auto p = node->get_optional<std::string>("path")) f.path = internal::Split(*p, ',');
      }
    }
    c.Validate();
    return c;
  } catch (const boost::property_tree::ptree_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline ExperimentConfig LoadIni(const std::string& path) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(path, pt);
  } catch (const boost::property_tree::ptree_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return FromPtree(pt);
}

}  // namespace bbrsim::harness

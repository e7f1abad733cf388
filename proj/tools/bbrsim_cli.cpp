// bbrsim: run, sweep and report on dumbbell congestion-control experiments.

#include <CLI11.hpp>

#include <boost/property_tree/ini_parser.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bbrsim/bbrsim.hpp"

namespace {

using namespace bbrsim;
using namespace bbrsim::harness;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 1;

std::filesystem::path DefaultOutRoot() {
  if (const char* env = std::getenv("BBRSIM_OUT_ROOT"); env != nullptr && *env != '\0') return env;
  return "results";
}

std::vector<std::string> SplitList(const std::string& s) { return harness::internal::Split(s, ','); }

std::vector<uint64_t> ParseSeeds(const std::string& s) {
  std::vector<uint64_t> seeds;
  for (const std::string& item : SplitList(s)) {
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const uint64_t a = std::stoull(item.substr(0, dash));
        const uint64_t b = std::stoull(item.substr(dash + 1));
        if (b < a) throw ConfigError("bad seed range: " + item);
        for (uint64_t k = a; k <= b; ++k) seeds.push_back(k);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad seed list: " + s);
    }
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

struct RunArgs {
  std::string config_path;
  std::string scenario;
  int case_id = 1;
  std::string algo;
  double loss = 0.0;
  uint64_t seed = 1;
  std::string out;
  bool print_config = false;
  bool quiet = false;
};

// The INI file (if any) is the base; flags given on the command line
// override its [experiment] keys.
ExperimentConfig ResolveRunConfig(const RunArgs& a, const CLI::App& cmd) {
  boost::property_tree::ptree pt;
  if (!a.config_path.empty()) {
    try {
      boost::property_tree::read_ini(a.config_path, pt);
    } catch (const boost::property_tree::ptree_error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (cmd.count("--scenario")) pt.put("experiment.scenario", a.scenario);
  if (cmd.count("--case")) pt.put("experiment.case", a.case_id);
  if (cmd.count("--algo")) pt.put("experiment.algo", a.algo);
  if (cmd.count("--loss")) pt.put("experiment.loss", a.loss);
  if (cmd.count("--seed")) pt.put("experiment.seed", a.seed);
  if (!pt.get_optional<std::string>("experiment.scenario")) throw ConfigError("--scenario (or --config) is required");
  if (!pt.get_optional<std::string>("experiment.algo")) throw ConfigError("--algo (or --config) is required");
  return FromPtree(pt);
}

int DoRun(const RunArgs& a, const CLI::App& cmd) {
  const ExperimentConfig cfg = ResolveRunConfig(a, cmd);
  if (a.print_config) {
    WriteIni(std::cout, cfg);
    return 0;
  }
  const std::filesystem::path dir = a.out.empty() ? RunDirectory(DefaultOutRoot(), cfg) : std::filesystem::path(a.out);
  const RunResult r = RunExperiment(cfg);
  WriteRunOutputs(r, dir);
  if (!a.quiet) {
    metrics::WriteSummaryCsv(std::cout, r.SummaryRows());
    std::cerr << "wrote " << dir.string() << '\n';
  }
  if (r.audit_failures != 0 || !r.delivery_consistent) {
    std::cerr << "error: conservation audit failed\n";
    return kExitRuntime;
  }
  return 0;
}

struct SweepArgs {
  std::string scenario;
  std::string algos;
  std::string seeds = "1";
  unsigned jobs = 0;
  std::string out;
};

int DoSweep(const SweepArgs& a) {
  const Scenario scenario = ParseScenario(a.scenario);
  const auto algos = SplitList(a.algos);
  for (const auto& name : algos) {
    if (!IsKnownAlgorithm(name)) throw ConfigError("unknown algorithm: " + name);
  }
  const auto plan = PlanSweep(scenario, algos, ParseSeeds(a.seeds));
  const unsigned jobs = a.jobs != 0 ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
  const std::filesystem::path root = a.out.empty() ? DefaultOutRoot() : std::filesystem::path(a.out);
  size_t done = 0;
  size_t failed = 0;
  RunSweep(plan, root, jobs, [&](size_t i, const SweepOutcome& o) {
    ++done;
    if (!o.ok) ++failed;
    std::cerr << '[' << done << '/' << plan.size() << "] " << ScenarioName(plan[i].scenario) << " case "
              << plan[i].CaseLabel() << ' ' << plan[i].algo << " seed " << plan[i].seed
              << (o.ok ? "" : " FAILED: " + o.error) << '\n';
  });
  std::cerr << plan.size() - failed << " of " << plan.size() << " runs written under " << root.string() << '\n';
  return failed == 0 ? 0 : kExitRuntime;
}

int DoReport(const std::string& dir, const std::string& out) {
  const Report rep = Aggregate(CollectSummaries(dir));
  if (out.empty()) {
    WriteReport(std::cout, rep);
    return 0;
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  WriteReport(os, rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-level dumbbell simulator for BBR-family congestion control"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("--config", run.config_path, "INI file with the experiment description")->check(CLI::ExistingFile);
  run_cmd->add_option("--scenario", run.scenario,
                      "intra_fairness | rtt_unfairness | utilization | responsiveness | inter_protocol");
  run_cmd->add_option("--case", run.case_id, "Case number in the scenario's table");
  run_cmd->add_option("--algo", run.algo, "reno cubic bbr bbr_prime bbrplus bbr_hsr tsunami bbr2");
  run_cmd->add_option("--loss", run.loss, "Random loss rate on the bottleneck (utilization only)");
  run_cmd->add_option("--seed", run.seed, "RNG seed");
  run_cmd->add_option("--out", run.out, "Output directory (default: <out root>/<scenario>/case<N>/<algo>/seed<K>)");
  run_cmd->add_flag("--print-config", run.print_config, "Print the resolved configuration as INI and exit");
  run_cmd->add_flag("-q,--quiet", run.quiet, "Do not echo the summary");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run every case of a scenario for a list of algorithms");
  sweep_cmd->add_option("--scenario", sweep.scenario, "Scenario name")->required();
  sweep_cmd->add_option("--algos", sweep.algos, "Comma-separated algorithm names")->required();
  sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds, e.g. 1,2,3 or 1-5");
  sweep_cmd->add_option("-j,--jobs", sweep.jobs, "Parallel runs (default: hardware threads)");
  sweep_cmd->add_option("--out", sweep.out, "Output root (default: $BBRSIM_OUT_ROOT or ./results)");

  std::string report_dir;
  std::string report_out;
  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate summary.csv files into comparison tables");
  report_cmd->add_option("--dir", report_dir, "Directory searched recursively for summary.csv")->required();
  report_cmd->add_option("-o,--output", report_out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return DoRun(run, *run_cmd);
    if (sweep_cmd->parsed()) return DoSweep(sweep);
    if (report_cmd->parsed()) return DoReport(report_dir, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

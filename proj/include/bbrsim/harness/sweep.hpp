#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "bbrsim/harness/config.hpp"
#include "bbrsim/harness/runner.hpp"

namespace bbrsim::harness {

// Cartesian product of cases x algos (x loss rates for utilization) x seeds.
inline std::vector<ExperimentConfig> PlanSweep(Scenario scenario, const std::vector<std::string>& algos,
                                               const std::vector<uint64_t>& seeds) {
  if (algos.empty()) throw ConfigError("sweep needs at least one algorithm");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  std::vector<double> losses{0.0};
  if (scenario == Scenario::kUtilization) losses.assign(kUtilizationLossRates.begin(), kUtilizationLossRates.end());
  std::vector<ExperimentConfig> plan;
  for (const std::string& algo : algos) {
    for (int id : ScenarioCases(scenario)) {
      for (double loss : losses) {
        for (uint64_t seed : seeds) plan.push_back(MakeExperiment(scenario, id, algo, loss, seed));
      }
    }
  }
  return plan;
}

struct SweepOutcome {
  std::filesystem::path dir;
  bool ok = false;
  std::string error;
};

// Runs every config on `jobs` worker threads, one simulator per run, each
// writing into its own directory under `out_root`. `on_done` is called under
// a lock as runs finish.
inline std::vector<SweepOutcome> RunSweep(const std::vector<ExperimentConfig>& plan,
                                          const std::filesystem::path& out_root, unsigned jobs,
                                          const std::function<void(size_t, const SweepOutcome&)>& on_done = {}) {
  std::vector<SweepOutcome> outcomes(plan.size());
  std::atomic<size_t> next{0};
  std::mutex mu;
  auto worker = [&] {
    for (size_t i = next++; i < plan.size(); i = next++) {
      SweepOutcome& o = outcomes[i];
      o.dir = RunDirectory(out_root, plan[i]);
      try {
        WriteRunOutputs(RunExperiment(plan[i]), o.dir);
        o.ok = true;
      } catch (const std::exception& e) {
        o.error = e.what();
      }
      if (on_done) {
        std::lock_guard<std::mutex> lock(mu);
        on_done(i, o);
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(plan.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return outcomes;
}

}  // namespace bbrsim::harness

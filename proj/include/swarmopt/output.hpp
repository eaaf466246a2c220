#pragma once

#include <string>

#include "swarmopt/runner.hpp"
#include "swarmopt/scenario.hpp"

namespace swarm {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Writes trajectories.csv, residuals.csv, summary.txt and events.log
/// into a run directory named after the scenario and seed, created under
/// out_dir. Returns the run directory path. All four files are
/// deterministic for a fixed (scenario, seed).
std::string write_results(const RunResult& result, const ScenarioConfig& config,
                          const std::string& out_dir);

}  // namespace swarm

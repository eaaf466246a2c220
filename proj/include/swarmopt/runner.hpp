#pragma once

#include <memory>
#include <string>
#include <vector>

#include "swarmopt/event_trace.hpp"
#include "swarmopt/master.hpp"
#include "swarmopt/residuals.hpp"
#include "swarmopt/scenario.hpp"
#include "swarmopt/types.hpp"
#include "swarmopt/worker.hpp"

namespace swarm {

enum class RunStatus { Converged, CapHit };

struct RunResult {
  RunStatus status = RunStatus::CapHit;
  bool any_degraded = false;
  std::vector<Trajectory> trajectories;  // safe-copy trajectories per agent
  Eigen::VectorXd terminal_times;        // t_tilde per agent
  std::vector<ResidualReport> history;   // one report per master commit
  long commits = 0;
  std::vector<long> worker_clocks;
  ConsensusState consensus;
  double virtual_time = 0.0;
  double wall_seconds = 0.0;
  EventTrace trace;

  int exit_code() const { return status == RunStatus::Converged ? 0 : 2; }
};

struct RunOptions {
  /// Workers' compute runs on separate threads when true; the event
  /// queue still fixes the ordering, so traces are identical either way.
  bool threaded = false;
};

/// Builds the graph, master and workers from a scenario and drives the
/// virtual-time event loop to convergence or a cap.
RunResult run_swarm(const ScenarioConfig& config, const RunOptions& options = {});

/// Per-agent worker parameters derived from a scenario and its graph.
WorkerParams make_worker_params(const ScenarioConfig& config,
                                const NeighborGraph& graph, AgentId agent);

}  // namespace swarm

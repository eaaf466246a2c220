#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "swarmopt/graph.hpp"
#include "swarmopt/safe_update.hpp"
#include "swarmopt/types.hpp"

namespace swarm {

struct AgentSpec {
  Eigen::Vector3d initial;  // x [m], y [m], heading [rad]
  Eigen::Vector3d target;
};

/// Complete description of one run: swarm, model, constraints, penalties
/// and protocol settings. Headings are radians internally; the file
/// format carries degrees.
struct ScenarioConfig {
  std::string name = "scenario";

  // vehicle model
  double speed = 30.0;
  double omega_max = 0.5678;
  int horizon_steps = 100;

  // terminal time
  double t_min = 0.1;
  double t_max = 20.0;
  double theta_guess = 9.0;

  std::vector<AgentSpec> agents;

  // cost weights (scalars expanded to diagonal matrices)
  double terminal_weight = 25.0;
  double control_weight = 1.0;
  double state_weight = 0.0;

  ObstacleSet obstacles;
  ProximitySpec prox{10.0, 390.0};
  int neighborhood_size = 3;

  // arrival sequencing: agent i must arrive interval * rank difference
  // apart from each neighbor; empty order means ranks follow agent ids
  double seq_interval = 0.1;
  double seq_relax_eps = 0.01;
  std::vector<int> arrival_order;

  Penalties penalties;

  double damping = 0.4;
  int pddp_max_iters = 50;
  double pddp_cost_tol = 1e-6;
  int init_max_iters = 200;

  double eps_abs = 5e-4;
  double eps_rel = 6e-2;

  // protocol
  int barrier_S = 2;
  int delay_bound = 10;
  double p_con = 0.7;
  std::uint64_t seed = 1;
  long commit_cap = 2000;
  double virtual_time_cap = 1e5;
  double link_latency = 0.1;
  double retry_backoff = 2.0;
  double latency_min = 1.0;
  double latency_max = 2.0;
  bool symmetric_loss = false;

  std::string mode = "async";  // "async" or "sync"

  int num_agents() const { return static_cast<int>(agents.size()); }
  int rank_of(AgentId i) const {
    return arrival_order.empty() ? i : arrival_order[i];
  }
  bool sync_baseline() const { return mode == "sync"; }

  std::vector<Eigen::Vector2d> initial_positions() const;
  /// Effective protocol values after the sync-baseline overrides
  /// (p_con = 1, S = M, delay bound 1, constant compute latency).
  ScenarioConfig effective() const;
};

/// Parses and validates; throws ConfigError naming the offending field.
/// Overrides are dotted-path assignments like "protocol.p_con=0.5".
ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides = {});
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::vector<std::string>& overrides = {});
std::string scenario_to_json(const ScenarioConfig& config);

void validate_scenario(const ScenarioConfig& config);

}  // namespace swarm

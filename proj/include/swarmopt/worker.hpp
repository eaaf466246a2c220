#pragma once

#include <Eigen/Dense>
#include <vector>

#include "swarmopt/pddp.hpp"
#include "swarmopt/safe_update.hpp"
#include "swarmopt/types.hpp"

namespace swarm {

enum class WorkerStatus { Running, Converged, Degraded, Stopped };

/// Everything one worker needs besides its dynamics model: cost weights,
/// bounds, constraint sets, penalties and the local stacking geometry.
struct WorkerParams {
  Eigen::VectorXd target_state;
  Eigen::MatrixXd W_N, W_s, R;
  double t_min = 0.1, t_max = 20.0;
  double damping = 0.4;
  int pddp_max_iters = 50;
  double pddp_cost_tol = 1e-6;
  int init_max_iters = 200;
  ObstacleSet obstacles;
  ProximitySpec prox;
  TimeSequenceSpec seq;
  Penalties penalties;
  std::vector<int> block_sizes;  // per neighbor slot; slot 0 = self
};

/// Result of the compute half of one worker iteration (PDDP update plus
/// the three safe updates). Pure data so the compute can run off-thread.
struct WorkerIterationResult {
  Trajectory trajectory;
  SafeCopies safe;
  ResidualComponents residuals;
  SolveStatus solve_status = SolveStatus::Converged;
};

/// One agent of the swarm. Alternates local trajectory optimization and
/// safe-copy updates with waiting for consensus broadcasts; all
/// cross-agent coupling flows through messages.
class WorkerNode {
 public:
  WorkerNode(AgentId id, UnicycleModel model, WorkerParams params);

  AgentId id() const { return id_; }
  long clock() const { return clock_; }
  WorkerStatus status() const { return status_; }
  const Trajectory& trajectory() const { return traj_; }
  const SafeCopies& safe() const { return safe_; }
  const DualSet& duals() const { return duals_; }
  const WorkerParams& params() const { return params_; }
  long last_broadcast_clock() const { return last_broadcast_clock_; }

  /// Unconstrained trajectory optimization from zero controls at a fixed
  /// terminal-time guess; fills the self safe copies. Throws on solver
  /// failure.
  void init_local(const Eigen::VectorXd& x0, double theta_guess);

  /// Installs the neighbors' initial copies (one state history and time
  /// per non-self slot) and seeds the local consensus view with them.
  void finish_init(const std::vector<Eigen::MatrixXd>& neighbor_states,
                   const std::vector<double>& neighbor_times);

  /// The compute half of one iteration. Does not mutate the node, so it
  /// can run concurrently with other workers' computes.
  WorkerIterationResult compute_iteration() const;

  /// Adopts a compute result and returns the message for the master.
  WorkerUpdate commit_iteration(const WorkerIterationResult& result);

  /// Dual ascent against a fresh broadcast, then advances the clock.
  /// Returns false (no state change) for stale or repeated broadcasts.
  bool apply_broadcast(const GlobalBroadcast& broadcast);

  void stop() { status_ = WorkerStatus::Stopped; }

 private:
  AgentId id_;
  PddpSolver solver_;
  WorkerParams params_;

  Trajectory traj_;
  SafeCopies safe_;
  DualSet duals_;
  Eigen::MatrixXd z_aug_local_;  // latest consensus view
  Eigen::VectorXd s_aug_local_;
  long last_broadcast_clock_ = -1;
  long clock_ = 0;
  WorkerStatus status_ = WorkerStatus::Running;

  AugmentedCostContext make_context() const;
};

}  // namespace swarm

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "swarmopt/dynamics.hpp"
#include "swarmopt/types.hpp"

namespace swarm {

/// Everything the augmented local cost needs besides the trajectory:
/// safe copies and duals (penalty terms), target state and weights.
struct AugmentedCostContext {
  const SafeCopies* safe = nullptr;
  const DualSet* duals = nullptr;
  Eigen::VectorXd target_state;  // x_d
  Eigen::MatrixXd W_N;           // terminal weight, p x p
  Eigen::MatrixXd W_s;           // running state weight, p x p
  Eigen::MatrixXd R;             // control weight, q x q
  double t_min = 0.0;
  double t_max = 0.0;
  bool optimize_time = true;     // false: hold theta fixed (plain DDP)
};

struct RunningCost {
  double value = 0.0;
  Eigen::VectorXd l_x, l_u;
  Eigen::MatrixXd l_xx, l_uu, l_xu;
};

/// Quadratic model of the cost-to-go in (x, theta) at one step.
struct ValueExpansion {
  double value = 0.0;
  Eigen::VectorXd V_x;
  double V_theta = 0.0;
  Eigen::MatrixXd V_xx;
  Eigen::VectorXd V_xtheta;
  double V_thetatheta = 0.0;
};

struct GainStep {
  Eigen::VectorXd ff;       // feedforward du*
  Eigen::MatrixXd K_x;      // q x p feedback on state deviation
  Eigen::VectorXd K_theta;  // q, feedback on the theta change
};

struct GainSchedule {
  std::vector<GainStep> steps;  // one per control step
  double dtheta = 0.0;          // Newton step on the terminal time
  ValueExpansion value_at_start;
};

enum class SolveStatus { Converged, MaxIterations, Degraded };

struct LocalSolveResult {
  Trajectory trajectory;
  double cost = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::Converged;
};

/// Free-final-time DDP on the penalty-augmented local cost. The terminal
/// time is the scalar parameter of the value expansion; control updates
/// are clamped to the turn-rate box and the time update to its bounds.
class PddpSolver {
 public:
  explicit PddpSolver(UnicycleModel model) : model_(std::move(model)) {}

  const UnicycleModel& model() const { return model_; }

  RunningCost augmented_running_cost(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& u, int k,
                                     const AugmentedCostContext& ctx) const;
  ValueExpansion terminal_value(const Eigen::VectorXd& x_N, double theta,
                                const AugmentedCostContext& ctx) const;

  /// Total augmented cost of a trajectory (running + terminal), without
  /// the iteration-invariant completed-square constants.
  double augmented_cost(const Trajectory& traj,
                        const AugmentedCostContext& ctx) const;

  /// Backward sweep over the Q model. Returns nullopt when the control
  /// Hessian cannot be made positive definite within the regularization
  /// budget.
  std::optional<GainSchedule> backward_pass(const Trajectory& traj,
                                            const AugmentedCostContext& ctx) const;

  /// Applies gains at step scale `damping`, clamps controls and the
  /// terminal time, and re-rolls the states.
  Trajectory forward_pass(const Trajectory& traj, const GainSchedule& gains,
                          double damping, const AugmentedCostContext& ctx) const;

  LocalSolveResult solve_local(const Trajectory& traj_init,
                               const AugmentedCostContext& ctx, int max_iters,
                               double cost_tol, double damping) const;

 private:
  UnicycleModel model_;
};

}  // namespace swarm

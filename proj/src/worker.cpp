#include "swarmopt/worker.hpp"

#include <stdexcept>

namespace swarm {

WorkerNode::WorkerNode(AgentId id, UnicycleModel model, WorkerParams params)
    : id_(id), solver_(std::move(model)), params_(std::move(params)) {
  const int n = solver_.model().horizon_steps();
  const int p = UnicycleModel::state_dim;
  const int q = UnicycleModel::control_dim;
  int p_aug = 0;
  for (int sz : params_.block_sizes) p_aug += sz;

  duals_.zeta = Eigen::MatrixXd::Zero(q, n);
  duals_.lambda = Eigen::MatrixXd::Zero(p, n + 1);
  duals_.nu = 0.0;
  duals_.y = Eigen::MatrixXd::Zero(p_aug, n + 1);
  duals_.eta = Eigen::VectorXd::Zero(params_.block_sizes.size());
  duals_.penalties = params_.penalties;

  safe_.x_tilde = Eigen::MatrixXd::Zero(p, n + 1);
  safe_.u_tilde = Eigen::MatrixXd::Zero(q, n);
  safe_.x_tilde_aug = Eigen::MatrixXd::Zero(p_aug, n + 1);
  safe_.t_tilde_aug = Eigen::VectorXd::Zero(params_.block_sizes.size());
}

AugmentedCostContext WorkerNode::make_context() const {
  AugmentedCostContext ctx;
  ctx.safe = &safe_;
  ctx.duals = &duals_;
  ctx.target_state = params_.target_state;
  ctx.W_N = params_.W_N;
  ctx.W_s = params_.W_s;
  ctx.R = params_.R;
  ctx.t_min = params_.t_min;
  ctx.t_max = params_.t_max;
  return ctx;
}

void WorkerNode::init_local(const Eigen::VectorXd& x0, double theta_guess) {
  const int n = solver_.model().horizon_steps();
  Trajectory guess;
  guess.controls =
      Eigen::MatrixXd::Zero(UnicycleModel::control_dim, n);
  guess.states = solver_.model().rollout(x0, guess.controls, theta_guess);
  guess.terminal_time = theta_guess;

  // plain DDP: duals are zero and the safe copies track the trajectory,
  // so only the base cost is active; the terminal time stays fixed
  SafeCopies init_safe = safe_;
  init_safe.x_tilde = guess.states;
  init_safe.u_tilde = guess.controls;
  init_safe.t_tilde = theta_guess;
  DualSet init_duals = duals_;
  init_duals.penalties = Penalties{0.0, 0.0, 0.0, 0.0, 0.0};

  AugmentedCostContext ctx = make_context();
  ctx.safe = &init_safe;
  ctx.duals = &init_duals;
  ctx.optimize_time = false;

  LocalSolveResult res = solver_.solve_local(
      guess, ctx, params_.init_max_iters, params_.pddp_cost_tol,
      params_.damping);
  if (res.status == SolveStatus::Degraded ||
      !res.trajectory.states.allFinite())
    throw std::runtime_error("worker init: unconstrained solve failed");

  traj_ = res.trajectory;
  safe_.x_tilde = traj_.states;
  safe_.u_tilde = traj_.controls;
  safe_.t_tilde = traj_.terminal_time;
}

void WorkerNode::finish_init(
    const std::vector<Eigen::MatrixXd>& neighbor_states,
    const std::vector<double>& neighbor_times) {
  const int n_blocks = static_cast<int>(params_.block_sizes.size());
  if (static_cast<int>(neighbor_states.size()) != n_blocks - 1 ||
      static_cast<int>(neighbor_times.size()) != n_blocks - 1)
    throw std::logic_error("worker init: neighbor copy count mismatch");

  int at = params_.block_sizes[0];
  safe_.x_tilde_aug.topRows(params_.block_sizes[0]) = safe_.x_tilde;
  safe_.t_tilde_aug[0] = safe_.t_tilde;
  for (int b = 1; b < n_blocks; ++b) {
    safe_.x_tilde_aug.middleRows(at, params_.block_sizes[b]) =
        neighbor_states[b - 1];
    safe_.t_tilde_aug[b] = neighbor_times[b - 1];
    at += params_.block_sizes[b];
  }
  z_aug_local_ = safe_.x_tilde_aug;
  s_aug_local_ = safe_.t_tilde_aug;
}

WorkerIterationResult WorkerNode::compute_iteration() const {
  WorkerIterationResult out;

  AugmentedCostContext ctx = make_context();
  LocalSolveResult solved =
      solver_.solve_local(traj_, ctx, params_.pddp_max_iters,
                          params_.pddp_cost_tol, params_.damping);
  out.trajectory = solved.trajectory;
  out.solve_status = solved.status;

  const Penalties& pen = params_.penalties;
  StateSafeResult state_res = state_safe_update(
      out.trajectory.states, safe_.x_tilde_aug, duals_, z_aug_local_,
      params_.obstacles, params_.prox, params_.block_sizes);
  TimeSafeResult time_res = time_safe_update(
      out.trajectory.terminal_time, duals_.nu, duals_.eta, s_aug_local_,
      params_.seq, pen.time, pen.consensus_time, params_.t_min, params_.t_max);

  out.safe.x_tilde_aug = state_res.x_tilde_aug;
  out.safe.x_tilde = state_res.x_tilde_aug.topRows(params_.block_sizes[0]);
  out.safe.u_tilde =
      control_safe_update(out.trajectory.controls, duals_.zeta, pen.control,
                          solver_.model().omega_max());
  out.safe.t_tilde = time_res.t_tilde;
  out.safe.t_tilde_aug = time_res.t_tilde_aug;

  ResidualComponents& rc = out.residuals;
  rc.primal_u = (out.trajectory.controls - out.safe.u_tilde).squaredNorm();
  rc.primal_x = (out.trajectory.states - out.safe.x_tilde).squaredNorm();
  const double dt_gap = out.trajectory.terminal_time - out.safe.t_tilde;
  rc.primal_t = dt_gap * dt_gap;
  rc.primal_xa = (out.safe.x_tilde_aug - z_aug_local_).squaredNorm();
  rc.primal_ta = (out.safe.t_tilde_aug - s_aug_local_).squaredNorm();
  rc.delta_u_tilde = (out.safe.u_tilde - safe_.u_tilde).squaredNorm();
  rc.delta_x_tilde = (out.safe.x_tilde - safe_.x_tilde).squaredNorm();
  const double dtt = out.safe.t_tilde - safe_.t_tilde;
  rc.delta_t_tilde = dtt * dtt;
  rc.norm_u = out.trajectory.controls.squaredNorm();
  rc.norm_u_tilde = out.safe.u_tilde.squaredNorm();
  rc.norm_x = out.trajectory.states.squaredNorm();
  rc.norm_x_tilde = out.safe.x_tilde.squaredNorm();
  rc.norm_t = out.trajectory.terminal_time * out.trajectory.terminal_time;
  rc.norm_t_tilde = out.safe.t_tilde * out.safe.t_tilde;
  rc.norm_xa = out.safe.x_tilde_aug.squaredNorm();
  rc.norm_za_local = z_aug_local_.squaredNorm();
  rc.norm_ta = out.safe.t_tilde_aug.squaredNorm();
  rc.norm_sa_local = s_aug_local_.squaredNorm();
  rc.norm_zeta = duals_.zeta.squaredNorm();
  rc.norm_lambda = duals_.lambda.squaredNorm();
  rc.norm_nu = duals_.nu * duals_.nu;
  rc.norm_y = duals_.y.squaredNorm();
  rc.norm_eta = duals_.eta.squaredNorm();
  return out;
}

WorkerUpdate WorkerNode::commit_iteration(const WorkerIterationResult& result) {
  traj_ = result.trajectory;
  safe_ = result.safe;
  if (result.solve_status == SolveStatus::Degraded)
    status_ = WorkerStatus::Degraded;

  WorkerUpdate msg;
  msg.sender = id_;
  msg.worker_clock = clock_;
  msg.x_tilde_aug = safe_.x_tilde_aug;
  msg.t_tilde_aug = safe_.t_tilde_aug;
  msg.y = duals_.y;
  msg.eta = duals_.eta;
  msg.residuals = result.residuals;
  return msg;
}

bool WorkerNode::apply_broadcast(const GlobalBroadcast& broadcast) {
  if (broadcast.shutdown) {
    status_ = WorkerStatus::Stopped;
    return false;
  }
  if (broadcast.master_clock <= last_broadcast_clock_) return false;

  const Penalties& pen = params_.penalties;
  duals_.zeta += pen.control * (traj_.controls - safe_.u_tilde);
  duals_.lambda += pen.state * (traj_.states - safe_.x_tilde);
  duals_.nu += pen.time * (traj_.terminal_time - safe_.t_tilde);
  duals_.y += pen.consensus_state * (safe_.x_tilde_aug - broadcast.z_aug);
  duals_.eta += pen.consensus_time * (safe_.t_tilde_aug - broadcast.s_aug);

  z_aug_local_ = broadcast.z_aug;
  s_aug_local_ = broadcast.s_aug;
  last_broadcast_clock_ = broadcast.master_clock;
  clock_ += 1;
  return true;
}

}  // namespace swarm

#include "swarmopt/pddp.hpp"

#include <algorithm>
#include <cmath>

namespace swarm {

namespace {

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

}  // namespace

RunningCost PddpSolver::augmented_running_cost(
    const Eigen::VectorXd& x, const Eigen::VectorXd& u, int k,
    const AugmentedCostContext& ctx) const {
  const int p = static_cast<int>(x.size());
  const int q = static_cast<int>(u.size());
  const Penalties& pen = ctx.duals->penalties;
  const double rho = pen.state;
  const double pu = pen.control;

  const Eigen::VectorXd dx_target = x - ctx.target_state;
  const Eigen::VectorXd dx_safe = x - ctx.safe->x_tilde.col(k);
  const Eigen::VectorXd du_safe = u - ctx.safe->u_tilde.col(k);
  const Eigen::VectorXd lambda = ctx.duals->lambda.col(k);
  const Eigen::VectorXd zeta = ctx.duals->zeta.col(k);

  RunningCost c;
  // base quadratic cost plus the penalty terms, written without the
  // completed-square constants so zero penalties stay well defined
  c.value = 0.5 * u.dot(ctx.R * u) + 0.5 * dx_target.dot(ctx.W_s * dx_target) +
            0.5 * rho * dx_safe.squaredNorm() + lambda.dot(dx_safe) +
            0.5 * pu * du_safe.squaredNorm() + zeta.dot(du_safe);
  c.l_x = ctx.W_s * dx_target + rho * dx_safe + lambda;
  c.l_u = ctx.R * u + pu * du_safe + zeta;
  c.l_xx = ctx.W_s + rho * Eigen::MatrixXd::Identity(p, p);
  c.l_uu = ctx.R + pu * Eigen::MatrixXd::Identity(q, q);
  c.l_xu = Eigen::MatrixXd::Zero(p, q);
  return c;
}

ValueExpansion PddpSolver::terminal_value(const Eigen::VectorXd& x_N,
                                          double theta,
                                          const AugmentedCostContext& ctx) const {
  const int p = static_cast<int>(x_N.size());
  const Penalties& pen = ctx.duals->penalties;
  const double rho = pen.state;
  const double sigma = pen.time;
  const int n = model_.horizon_steps();

  const Eigen::VectorXd dx_target = x_N - ctx.target_state;
  const Eigen::VectorXd dx_safe = x_N - ctx.safe->x_tilde.col(n);
  const double dt_safe = theta - ctx.safe->t_tilde;
  const Eigen::VectorXd lambda_N = ctx.duals->lambda.col(n);
  const double nu = ctx.duals->nu;

  ValueExpansion v;
  v.value = 0.5 * dx_target.dot(ctx.W_N * dx_target) +
            0.5 * rho * dx_safe.squaredNorm() + lambda_N.dot(dx_safe) +
            0.5 * sigma * dt_safe * dt_safe + nu * dt_safe;
  v.V_x = ctx.W_N * dx_target + rho * dx_safe + lambda_N;
  v.V_theta = sigma * dt_safe + nu;
  v.V_xx = ctx.W_N + rho * Eigen::MatrixXd::Identity(p, p);
  v.V_xtheta = Eigen::VectorXd::Zero(p);
  v.V_thetatheta = sigma;
  return v;
}

double PddpSolver::augmented_cost(const Trajectory& traj,
                                  const AugmentedCostContext& ctx) const {
  double total = 0.0;
  for (int k = 0; k < traj.horizon(); ++k)
    total +=
        augmented_running_cost(traj.states.col(k), traj.controls.col(k), k, ctx)
            .value;
  total += terminal_value(traj.states.col(traj.horizon()), traj.terminal_time,
                          ctx)
               .value;
  return total;
}

std::optional<GainSchedule> PddpSolver::backward_pass(
    const Trajectory& traj, const AugmentedCostContext& ctx) const {
  const int n = traj.horizon();
  const int p = traj.state_dim();
  const int q = traj.control_dim();

  for (double reg = 0.0; reg <= 1e6; reg = (reg == 0.0 ? 1e-6 : reg * 10.0)) {
    GainSchedule out;
    out.steps.resize(n);
    ValueExpansion v =
        terminal_value(traj.states.col(n), traj.terminal_time, ctx);
    bool failed = false;

    for (int k = n - 1; k >= 0 && !failed; --k) {
      const Eigen::VectorXd x = traj.states.col(k);
      const Eigen::VectorXd u = traj.controls.col(k);
      const RunningCost l = augmented_running_cost(x, u, k, ctx);
      const DynamicsDerivatives d =
          model_.derivatives(x, u, traj.terminal_time);

      const Eigen::VectorXd q_x = l.l_x + d.f_x.transpose() * v.V_x;
      const Eigen::VectorXd q_u = l.l_u + d.f_u.transpose() * v.V_x;
      const double q_theta = v.V_theta + d.f_theta.dot(v.V_x);
      const Eigen::MatrixXd q_xx =
          l.l_xx + d.f_x.transpose() * v.V_xx * d.f_x;
      Eigen::MatrixXd q_uu = l.l_uu + d.f_u.transpose() * v.V_xx * d.f_u;
      const double q_tt = v.V_thetatheta +
                          d.f_theta.dot(v.V_xx * d.f_theta) +
                          2.0 * d.f_theta.dot(v.V_xtheta);
      const Eigen::MatrixXd q_xu = l.l_xu + d.f_x.transpose() * v.V_xx * d.f_u;
      const Eigen::VectorXd q_xtheta =
          d.f_x.transpose() * (v.V_xx * d.f_theta) +
          d.f_x.transpose() * v.V_xtheta;
      const Eigen::VectorXd q_utheta =
          d.f_u.transpose() * (v.V_xx * d.f_theta) +
          d.f_u.transpose() * v.V_xtheta;

      if (!q_x.allFinite() || !q_u.allFinite() || !std::isfinite(q_theta) ||
          !q_xx.allFinite() || !q_uu.allFinite() || !std::isfinite(q_tt))
        return std::nullopt;

      q_uu += reg * Eigen::MatrixXd::Identity(q, q);
      Eigen::LLT<Eigen::MatrixXd> llt(q_uu);
      if (llt.info() != Eigen::Success) {
        failed = true;
        break;
      }

      GainStep& gs = out.steps[k];
      gs.ff = -llt.solve(q_u);
      gs.K_x = -llt.solve(q_xu.transpose());
      gs.K_theta = -llt.solve(q_utheta);

      ValueExpansion next;
      next.value = v.value + l.value + gs.ff.dot(q_u) +
                   0.5 * gs.ff.dot(q_uu * gs.ff);
      next.V_x = q_x + q_xu * gs.ff;
      next.V_xx = q_xx + q_xu * gs.K_x;
      next.V_theta = q_theta + q_utheta.dot(gs.ff);
      next.V_thetatheta = q_tt + q_utheta.dot(gs.K_theta);
      next.V_xtheta = q_xtheta + q_xu * gs.K_theta;
      next.V_xx = 0.5 * (next.V_xx + next.V_xx.transpose()).eval();
      v = std::move(next);
    }
    if (failed) continue;

    out.value_at_start = v;
    if (ctx.optimize_time) {
      const double denom = v.V_thetatheta;
      if (denom > 1e-12)
        out.dtheta = -v.V_theta / denom;
      else
        out.dtheta = -v.V_theta;  // gradient fallback, damped downstream
    } else {
      out.dtheta = 0.0;
    }
    return out;
  }
  return std::nullopt;
}

Trajectory PddpSolver::forward_pass(const Trajectory& traj,
                                    const GainSchedule& gains, double damping,
                                    const AugmentedCostContext& ctx) const {
  const int n = traj.horizon();
  const double omega_max = model_.omega_max();

  Trajectory next;
  next.terminal_time =
      ctx.optimize_time
          ? clamp(traj.terminal_time + damping * gains.dtheta, ctx.t_min,
                  ctx.t_max)
          : traj.terminal_time;
  const double dtheta = next.terminal_time - traj.terminal_time;

  next.states.resize(traj.states.rows(), n + 1);
  next.controls.resize(traj.controls.rows(), n);
  next.states.col(0) = traj.states.col(0);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd dx = next.states.col(k) - traj.states.col(k);
    Eigen::VectorXd u = traj.controls.col(k) + damping * gains.steps[k].ff +
                        gains.steps[k].K_x * dx + gains.steps[k].K_theta * dtheta;
    for (Eigen::Index j = 0; j < u.size(); ++j)
      u[j] = clamp(u[j], -omega_max, omega_max);
    next.controls.col(k) = u;
    next.states.col(k + 1) =
        model_.step(next.states.col(k), u, next.terminal_time);
  }
  return next;
}

LocalSolveResult PddpSolver::solve_local(const Trajectory& traj_init,
                                         const AugmentedCostContext& ctx,
                                         int max_iters, double cost_tol,
                                         double damping) const {
  LocalSolveResult res;
  res.trajectory = traj_init;
  res.cost = augmented_cost(traj_init, ctx);
  res.status = SolveStatus::MaxIterations;

  for (int it = 0; it < max_iters; ++it) {
    res.iterations = it + 1;
    const auto gains = backward_pass(res.trajectory, ctx);
    if (!gains) {
      res.status = SolveStatus::Degraded;
      return res;
    }

    bool accepted = false;
    double alpha = damping;
    for (int trial = 0; trial < 10; ++trial, alpha *= 0.5) {
      Trajectory candidate = forward_pass(res.trajectory, *gains, alpha, ctx);
      if (!candidate.states.allFinite() || !candidate.controls.allFinite())
        continue;
      const double cost = augmented_cost(candidate, ctx);
      if (cost < res.cost) {
        const double drop = res.cost - cost;
        res.trajectory = std::move(candidate);
        res.cost = cost;
        accepted = true;
        if (drop < cost_tol) {
          res.status = SolveStatus::Converged;
          return res;
        }
        break;
      }
    }
    if (!accepted) {
      res.status = SolveStatus::Converged;  // no descent direction left
      return res;
    }
  }
  return res;
}

}  // namespace swarm

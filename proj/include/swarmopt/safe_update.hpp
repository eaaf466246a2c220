#pragma once

#include <Eigen/Dense>
#include <vector>

#include "swarmopt/types.hpp"

namespace swarm {

struct Circle {
  Eigen::Vector2d center;
  double radius = 0.0;
};

/// Circular no-fly zones plus the required clearance beyond each radius.
struct ObstacleSet {
  std::vector<Circle> circles;
  double safe_margin = 0.0;  // d_o

  double keepout(const Circle& c) const { return c.radius + safe_margin; }
};

/// Pairwise distance band between an agent and each of its neighbors.
struct ProximitySpec {
  double d_col = 0.0;  // minimum separation
  double d_con = 0.0;  // maximum (connectivity) separation
};

/// Arrival-order constraints relative to each non-self neighbor slot:
/// t_self - t_j must lie within t_delta[j] +/- relax_eps[j].
struct TimeSequenceSpec {
  Eigen::VectorXd t_delta;    // one entry per non-self neighbor slot
  Eigen::VectorXd relax_eps;  // same length, >= 0

  /// Materializes the row form: row r has +1 on the self column and -1 on
  /// the column of non-self slot r.
  Eigen::MatrixXd coefficient_matrix() const;
};

/// Weighted projection of (p, q) onto {|p - q| >= d} or {|p - q| <= d}:
/// each point moves along the connecting line, split inversely to its
/// weight. Exposed for testing.
void project_pair_distance(Eigen::Ref<Eigen::Vector2d> p, double weight_p,
                           Eigen::Ref<Eigen::Vector2d> q, double weight_q,
                           double distance, bool keep_outside);

/// Projection of a point onto the exterior of a circle (plus margin).
void project_circle_exterior(Eigen::Ref<Eigen::Vector2d> point,
                             const Eigen::Vector2d& center, double keepout,
                             const Eigen::Vector2d& fallback_direction);

struct StateSafeResult {
  Eigen::MatrixXd x_tilde_aug;  // p_aug x (N+1); self block first
  int infeasible_steps = 0;     // steps left violating after projection
};

/// Per-step minimizer of the state consensus quadratic subject to the
/// obstacle keepouts on the self block and the distance band between the
/// self block and each neighbor block. Solved by alternating projections
/// with Dykstra corrections in the weighted metric, followed by a plain
/// feasibility sweep (collision and obstacle constraints take priority
/// over connectivity when both cannot hold).
StateSafeResult state_safe_update(const Eigen::MatrixXd& x_primal,
                                  const Eigen::MatrixXd& x_aug_prev,
                                  const DualSet& duals,
                                  const Eigen::MatrixXd& z_aug,
                                  const ObstacleSet& obstacles,
                                  const ProximitySpec& prox,
                                  const std::vector<int>& block_sizes);

/// Closed-form minimizer of the control consensus quadratic under the
/// turn-rate box: clamp(u + zeta/pen_u).
Eigen::MatrixXd control_safe_update(const Eigen::MatrixXd& u_primal,
                                    const Eigen::MatrixXd& zeta, double pen_u,
                                    double omega_max);

struct TimeSafeResult {
  double t_tilde = 0.0;
  Eigen::VectorXd t_tilde_aug;
};

/// Exact minimizer of the time consensus quadratic subject to the bounds
/// on the self entry and the relaxed arrival-order band against each
/// neighbor entry. The neighbor entries reduce to clamps given the self
/// entry, leaving a convex piecewise-quadratic 1-D problem solved over
/// its breakpoints.
TimeSafeResult time_safe_update(double t_primal, double nu,
                                const Eigen::VectorXd& eta,
                                const Eigen::VectorXd& s_aug,
                                const TimeSequenceSpec& seq, double sigma,
                                double gamma, double t_min, double t_max);

}  // namespace swarm

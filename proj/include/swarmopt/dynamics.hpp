#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "swarmopt/types.hpp"

namespace swarm {

/// Jacobians of one discrete step with respect to state, control and the
/// terminal-time parameter.
struct DynamicsDerivatives {
  Eigen::MatrixXd f_x;      // p x p
  Eigen::MatrixXd f_u;      // p x q
  Eigen::VectorXd f_theta;  // p
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Constant-speed planar point with heading rate control, state
/// [x, y, heading]. Discretized by forward Euler with dt = theta / N, so
/// the free terminal time enters the dynamics only through the step size.
/// Headings are kept unwrapped.
class UnicycleModel {
 public:
  UnicycleModel(double speed, int horizon_steps, double omega_max);

  double speed() const { return speed_; }
  int horizon_steps() const { return horizon_steps_; }
  double omega_max() const { return omega_max_; }
  static constexpr int state_dim = 3;
  static constexpr int control_dim = 1;

  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                       double theta) const;
  DynamicsDerivatives derivatives(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u,
                                  double theta) const;
  /// states: p x (N+1), column 0 = x0, column k+1 = step(column k, u_k).
  Eigen::MatrixXd rollout(const Eigen::VectorXd& x0,
                          const Eigen::MatrixXd& controls, double theta) const;

 private:
  double speed_;
  int horizon_steps_;
  double omega_max_;
};

}  // namespace swarm

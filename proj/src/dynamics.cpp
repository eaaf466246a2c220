#include "swarmopt/dynamics.hpp"

#include <cmath>

namespace swarm {

UnicycleModel::UnicycleModel(double speed, int horizon_steps, double omega_max)
    : speed_(speed), horizon_steps_(horizon_steps), omega_max_(omega_max) {
  if (!(speed > 0)) throw ConfigError("unicycle: speed must be positive");
  if (horizon_steps < 2)
    throw ConfigError("unicycle: horizon_steps must be >= 2");
  if (!(omega_max > 0)) throw ConfigError("unicycle: omega_max must be positive");
}

Eigen::VectorXd UnicycleModel::step(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& u,
                                    double theta) const {
  if (!x.allFinite() || !u.allFinite() || !std::isfinite(theta))
    throw NumericError("unicycle step: non-finite input");
  const double dt = theta / horizon_steps_;
  Eigen::VectorXd out(3);
  out[0] = x[0] + dt * speed_ * std::cos(x[2]);
  out[1] = x[1] + dt * speed_ * std::sin(x[2]);
  out[2] = x[2] + dt * u[0];
  return out;
}

DynamicsDerivatives UnicycleModel::derivatives(const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& u,
                                               double theta) const {
  const double dt = theta / horizon_steps_;
  const double c = std::cos(x[2]);
  const double s = std::sin(x[2]);

  DynamicsDerivatives d;
  d.f_x = Eigen::MatrixXd::Identity(3, 3);
  d.f_x(0, 2) = -dt * speed_ * s;
  d.f_x(1, 2) = dt * speed_ * c;

  d.f_u = Eigen::MatrixXd::Zero(3, 1);
  d.f_u(2, 0) = dt;

  // dt = theta / N, so d(step)/d(theta) = (1/N) * xdot
  d.f_theta = Eigen::VectorXd(3);
  d.f_theta[0] = speed_ * c / horizon_steps_;
  d.f_theta[1] = speed_ * s / horizon_steps_;
  d.f_theta[2] = u[0] / horizon_steps_;
  return d;
}

Eigen::MatrixXd UnicycleModel::rollout(const Eigen::VectorXd& x0,
                                       const Eigen::MatrixXd& controls,
                                       double theta) const {
  const int n = static_cast<int>(controls.cols());
  Eigen::MatrixXd states(3, n + 1);
  states.col(0) = x0;
  for (int k = 0; k < n; ++k)
    states.col(k + 1) = step(states.col(k), controls.col(k), theta);
  return states;
}

}  // namespace swarm

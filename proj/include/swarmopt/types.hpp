#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace swarm {

using AgentId = int;

/// Invalid scenario or construction parameters.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-agent state/control history plus the free terminal time.
/// states: p x (N+1), controls: q x N, column k = value at step k.
struct Trajectory {
  Eigen::MatrixXd states;
  Eigen::MatrixXd controls;
  double terminal_time = 0.0;

  int horizon() const { return static_cast<int>(controls.cols()); }
  int state_dim() const { return static_cast<int>(states.rows()); }
  int control_dim() const { return static_cast<int>(controls.rows()); }
};

/// The five penalty parameters of the augmented Lagrangian. The symbol
/// tau is overloaded in the protocol (it also names the delay bound), so
/// penalties carry explicit names instead.
struct Penalties {
  double control = 0.2;          // on u - u_tilde
  double state = 2.0;            // rho, on x - x_tilde
  double time = 2.0;             // sigma, on t - t_tilde
  double consensus_state = 1.0;  // mu, on x_tilde_aug - z_aug
  double consensus_time = 1.0;   // gamma, on t_tilde_aug - s_aug

  bool valid() const {
    return control > 0 && state > 0 && time > 0 && consensus_state > 0 &&
           consensus_time > 0;
  }
};

/// All five dual vectors of one worker. Shapes mirror their primal
/// counterparts: zeta q x N, lambda p x (N+1), y p_aug x (N+1),
/// eta |N_i|, nu scalar.
struct DualSet {
  Eigen::MatrixXd zeta;
  Eigen::MatrixXd lambda;
  double nu = 0.0;
  Eigen::MatrixXd y;
  Eigen::VectorXd eta;
  Penalties penalties;
};

/// The tilde variables: constraint-satisfying copies of the primal
/// trajectory plus the neighbor-perspective augmented stacks. The self
/// block of x_tilde_aug is kept identical to x_tilde, and the self entry
/// of t_tilde_aug identical to t_tilde.
struct SafeCopies {
  Eigen::MatrixXd x_tilde;      // p x (N+1)
  Eigen::MatrixXd u_tilde;      // q x N
  double t_tilde = 0.0;
  Eigen::MatrixXd x_tilde_aug;  // p_aug x (N+1), blocks in neighbor order
  Eigen::VectorXd t_tilde_aug;  // |N_i|
};

/// Master-owned global variables: z[i] is p x (N+1), s[i] a scalar.
struct ConsensusState {
  std::vector<Eigen::MatrixXd> z;
  Eigen::VectorXd s;
};

/// Per-agent residual ingredients shipped with every WorkerUpdate so the
/// master can assemble global residual norms without a second gather.
/// All entries are squared Euclidean norms; negative means "not yet
/// available" (first iteration has no previous iterate).
struct ResidualComponents {
  double primal_u = -1, primal_x = -1, primal_t = -1;
  double primal_xa = -1, primal_ta = -1;
  double delta_u_tilde = -1, delta_x_tilde = -1, delta_t_tilde = -1;
  double norm_u = 0, norm_u_tilde = 0;
  double norm_x = 0, norm_x_tilde = 0;
  double norm_t = 0, norm_t_tilde = 0;
  double norm_xa = 0, norm_za_local = 0;
  double norm_ta = 0, norm_sa_local = 0;
  double norm_zeta = 0, norm_lambda = 0, norm_nu = 0;
  double norm_y = 0, norm_eta = 0;
};

/// Worker -> master message. Immutable once sent; carries the sender's
/// clock so the master can discard stale duplicates.
struct WorkerUpdate {
  AgentId sender = -1;
  long worker_clock = -1;
  Eigen::MatrixXd x_tilde_aug;
  Eigen::VectorXd t_tilde_aug;
  Eigen::MatrixXd y;
  Eigen::VectorXd eta;
  ResidualComponents residuals;
};

/// Master -> worker message: the recipient's neighborhood slice of the
/// consensus variables, or a shutdown order.
struct GlobalBroadcast {
  long master_clock = -1;
  Eigen::MatrixXd z_aug;  // p_aug x (N+1)
  Eigen::VectorXd s_aug;  // |N_i|
  bool shutdown = false;
};

}  // namespace swarm

#include "swarmopt/safe_update.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swarm {

namespace {

constexpr double kFeasTol = 1e-9;

struct PairConstraint {
  int block = 0;        // non-self neighbor slot index
  double distance = 0;  // d_col or d_con
  bool keep_outside = false;
};

// one step's stacked variable with per-block weights; positions are the
// first two components of each block
struct StepVars {
  Eigen::VectorXd v;
  std::vector<int> offsets;
  std::vector<double> weights;

  Eigen::Vector2d pos(int block) const {
    return v.segment<2>(offsets[block]);
  }
  void set_pos(int block, const Eigen::Vector2d& p) {
    v.segment<2>(offsets[block]) = p;
  }
};

}  // namespace

Eigen::MatrixXd TimeSequenceSpec::coefficient_matrix() const {
  const Eigen::Index rows = t_delta.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, rows + 1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    a(r, 0) = 1.0;
    a(r, r + 1) = -1.0;
  }
  return a;
}

void project_pair_distance(Eigen::Ref<Eigen::Vector2d> p, double weight_p,
                           Eigen::Ref<Eigen::Vector2d> q, double weight_q,
                           double distance, bool keep_outside) {
  Eigen::Vector2d diff = p - q;
  double dist = diff.norm();
  if (keep_outside ? dist >= distance : dist <= distance) return;

  Eigen::Vector2d dir;
  if (dist > 1e-14) {
    dir = diff / dist;
  } else {
    dir = Eigen::Vector2d(1.0, 0.0);
    dist = 0.0;
  }
  const Eigen::Vector2d delta_gap = (distance - dist) * dir;
  const double wsum = weight_p + weight_q;
  p += (weight_q / wsum) * delta_gap;
  q -= (weight_p / wsum) * delta_gap;
}

void project_circle_exterior(Eigen::Ref<Eigen::Vector2d> point,
                             const Eigen::Vector2d& center, double keepout,
                             const Eigen::Vector2d& fallback_direction) {
  const Eigen::Vector2d diff = point - center;
  const double dist = diff.norm();
  if (dist >= keepout) return;
  Eigen::Vector2d dir;
  if (dist > 1e-14) {
    dir = diff / dist;
  } else if (fallback_direction.norm() > 1e-14) {
    dir = fallback_direction.normalized();
  } else {
    dir = Eigen::Vector2d(1.0, 0.0);
  }
  point = center + keepout * dir;
}

namespace {

// applies one constraint's projection in the weighted metric
void apply_projection(StepVars& s, const ObstacleSet& obstacles,
                      const std::vector<PairConstraint>& pairs,
                      const Eigen::Vector2d& fallback, int index) {
  const int n_obs = static_cast<int>(obstacles.circles.size());
  if (index < n_obs) {
    Eigen::Vector2d p = s.pos(0);
    project_circle_exterior(p, obstacles.circles[index].center,
                            obstacles.keepout(obstacles.circles[index]),
                            fallback);
    s.set_pos(0, p);
    return;
  }
  const PairConstraint& pc = pairs[index - n_obs];
  Eigen::Vector2d p = s.pos(0);
  Eigen::Vector2d q = s.pos(pc.block);
  project_pair_distance(p, s.weights[0], q, s.weights[pc.block], pc.distance,
                        pc.keep_outside);
  s.set_pos(0, p);
  s.set_pos(pc.block, q);
}

double max_violation(const StepVars& s, const ObstacleSet& obstacles,
                     const std::vector<PairConstraint>& pairs) {
  double worst = 0.0;
  for (const Circle& c : obstacles.circles)
    worst = std::max(worst, obstacles.keepout(c) - (s.pos(0) - c.center).norm());
  for (const PairConstraint& pc : pairs) {
    const double dist = (s.pos(0) - s.pos(pc.block)).norm();
    worst = std::max(worst,
                     pc.keep_outside ? pc.distance - dist : dist - pc.distance);
  }
  return worst;
}

}  // namespace

StateSafeResult state_safe_update(const Eigen::MatrixXd& x_primal,
                                  const Eigen::MatrixXd& x_aug_prev,
                                  const DualSet& duals,
                                  const Eigen::MatrixXd& z_aug,
                                  const ObstacleSet& obstacles,
                                  const ProximitySpec& prox,
                                  const std::vector<int>& block_sizes) {
  const int steps = static_cast<int>(z_aug.cols());
  const int n_blocks = static_cast<int>(block_sizes.size());
  const double rho = duals.penalties.state;
  const double mu = duals.penalties.consensus_state;

  std::vector<int> offsets(n_blocks, 0);
  for (int b = 1; b < n_blocks; ++b)
    offsets[b] = offsets[b - 1] + block_sizes[b - 1];

  std::vector<PairConstraint> pairs;
  for (int b = 1; b < n_blocks; ++b) {
    pairs.push_back({b, prox.d_col, true});
    pairs.push_back({b, prox.d_con, false});
  }
  const int n_constraints =
      static_cast<int>(obstacles.circles.size() + pairs.size());

  StateSafeResult res;
  res.x_tilde_aug.resize(z_aug.rows(), steps);

  for (int k = 0; k < steps; ++k) {
    StepVars s;
    s.offsets = offsets;
    s.weights.assign(n_blocks, mu);
    s.weights[0] = rho + mu;
    s.v.resize(z_aug.rows());

    // unconstrained minimizer: neighbor blocks sit at z - y/mu, the self
    // block averages the lambda-shifted primal with its consensus pull
    for (int b = 0; b < n_blocks; ++b) {
      Eigen::VectorXd target = z_aug.col(k).segment(offsets[b], block_sizes[b]) -
                               duals.y.col(k).segment(offsets[b], block_sizes[b]) / mu;
      if (b == 0)
        target = (rho * (x_primal.col(k) + duals.lambda.col(k) / rho) +
                  mu * target) /
                 (rho + mu);
      s.v.segment(offsets[b], block_sizes[b]) = target;
    }

    const Eigen::Vector2d fallback =
        x_aug_prev.cols() == steps
            ? Eigen::Vector2d(x_aug_prev.col(k).segment<2>(0))
            : Eigen::Vector2d(1.0, 0.0);

    if (max_violation(s, obstacles, pairs) > kFeasTol && n_constraints > 0) {
      // Dykstra corrections in the weighted metric
      std::vector<Eigen::VectorXd> corrections(
          n_constraints, Eigen::VectorXd::Zero(s.v.size()));
      for (int sweep = 0; sweep < 100; ++sweep) {
        const Eigen::VectorXd at_sweep_start = s.v;
        for (int c = 0; c < n_constraints; ++c) {
          const Eigen::VectorXd before = s.v + corrections[c];
          s.v = before;
          apply_projection(s, obstacles, pairs, fallback, c);
          corrections[c] = before - s.v;
        }
        const double moved =
            (s.v - at_sweep_start).lpNorm<Eigen::Infinity>();
        if (moved < 1e-12 && max_violation(s, obstacles, pairs) <= kFeasTol)
          break;
        if (moved < 1e-14) break;
      }
      // plain feasibility sweeps; collision and obstacles are applied
      // after connectivity so they hold exactly if the sets conflict
      for (int sweep = 0;
           sweep < 50 && max_violation(s, obstacles, pairs) > kFeasTol;
           ++sweep) {
        for (const PairConstraint& pc : pairs)
          if (!pc.keep_outside) {
            Eigen::Vector2d p = s.pos(0), q = s.pos(pc.block);
            project_pair_distance(p, s.weights[0], q, s.weights[pc.block],
                                  pc.distance, pc.keep_outside);
            s.set_pos(0, p);
            s.set_pos(pc.block, q);
          }
        for (size_t o = 0; o < obstacles.circles.size(); ++o)
          apply_projection(s, obstacles, pairs, fallback, static_cast<int>(o));
        for (const PairConstraint& pc : pairs)
          if (pc.keep_outside) {
            Eigen::Vector2d p = s.pos(0), q = s.pos(pc.block);
            project_pair_distance(p, s.weights[0], q, s.weights[pc.block],
                                  pc.distance, pc.keep_outside);
            s.set_pos(0, p);
            s.set_pos(pc.block, q);
          }
      }
      if (max_violation(s, obstacles, pairs) > kFeasTol) ++res.infeasible_steps;
    }
    res.x_tilde_aug.col(k) = s.v;
  }
  return res;
}

Eigen::MatrixXd control_safe_update(const Eigen::MatrixXd& u_primal,
                                    const Eigen::MatrixXd& zeta, double pen_u,
                                    double omega_max) {
  return (u_primal + zeta / pen_u)
      .cwiseMin(omega_max)
      .cwiseMax(-omega_max);
}

TimeSafeResult time_safe_update(double t_primal, double nu,
                                const Eigen::VectorXd& eta,
                                const Eigen::VectorXd& s_aug,
                                const TimeSequenceSpec& seq, double sigma,
                                double gamma, double t_min, double t_max) {
  const int n_neighbors = static_cast<int>(s_aug.size()) - 1;

  // per-entry unconstrained targets
  const double w_self = sigma + gamma;
  const double c_self =
      (sigma * t_primal + nu + gamma * s_aug[0] - eta[0]) / w_self;
  Eigen::VectorXd c_nb(n_neighbors);
  for (int j = 0; j < n_neighbors; ++j)
    c_nb[j] = s_aug[j + 1] - eta[j + 1] / gamma;

  // residual of neighbor j for a given self time, after the neighbor entry
  // clamps into its band
  auto band_excess = [&](double t, int j) {
    const double center = c_nb[j] + seq.t_delta[j];
    const double e = seq.relax_eps[j];
    if (t < center - e) return t - (center - e);
    if (t > center + e) return t - (center + e);
    return 0.0;
  };
  auto objective = [&](double t) {
    double g = 0.5 * w_self * (t - c_self) * (t - c_self);
    for (int j = 0; j < n_neighbors; ++j) {
      const double r = band_excess(t, j);
      g += 0.5 * gamma * r * r;
    }
    return g;
  };

  std::vector<double> knots{t_min, t_max};
  for (int j = 0; j < n_neighbors; ++j) {
    for (double b : {c_nb[j] + seq.t_delta[j] - seq.relax_eps[j],
                     c_nb[j] + seq.t_delta[j] + seq.relax_eps[j]})
      if (b > t_min && b < t_max) knots.push_back(b);
  }
  std::sort(knots.begin(), knots.end());

  double best_t = t_min;
  double best_g = objective(t_min);
  auto consider = [&](double t) {
    const double g = objective(t);
    if (g < best_g) {
      best_g = g;
      best_t = t;
    }
  };
  consider(t_max);
  for (size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    // quadratic coefficients on this interval
    double wsum = w_self;
    double wtarget = w_self * c_self;
    for (int j = 0; j < n_neighbors; ++j) {
      const double center = c_nb[j] + seq.t_delta[j];
      const double e = seq.relax_eps[j];
      if (mid < center - e) {
        wsum += gamma;
        wtarget += gamma * (center - e);
      } else if (mid > center + e) {
        wsum += gamma;
        wtarget += gamma * (center + e);
      }
    }
    consider(std::clamp(wtarget / wsum, a, b));
  }

  TimeSafeResult out;
  out.t_tilde = best_t;
  out.t_tilde_aug.resize(n_neighbors + 1);
  out.t_tilde_aug[0] = best_t;
  for (int j = 0; j < n_neighbors; ++j) {
    const double lo = best_t - seq.t_delta[j] - seq.relax_eps[j];
    const double hi = best_t - seq.t_delta[j] + seq.relax_eps[j];
    out.t_tilde_aug[j + 1] = std::clamp(c_nb[j], lo, hi);
  }
  return out;
}

}  // namespace swarm

#include "swarmopt/master.hpp"

#include <algorithm>

namespace swarm {

MasterNode::MasterNode(const NeighborGraph& graph, ConsensusState initial,
                       int barrier_S, int delay_bound, int state_dim,
                       int horizon_steps, Penalties penalties)
    : graph_(graph),
      consensus_(std::move(initial)),
      barrier_S_(barrier_S),
      delay_bound_(delay_bound),
      state_dim_(state_dim),
      horizon_steps_(horizon_steps),
      penalties_(penalties) {
  const int m = graph_.num_agents();
  if (barrier_S_ < 1 || barrier_S_ > m)
    throw ConfigError("master: barrier S must be in [1, M]");
  if (delay_bound_ < 1) throw ConfigError("master: delay bound must be >= 1");
  mailbox_.resize(m);
  staleness_.assign(m, 1);

  const double n1 = horizon_steps_ + 1;
  dims_[kU] = static_cast<double>(m) * horizon_steps_;
  dims_[kX] = static_cast<double>(m) * n1 * state_dim_;
  dims_[kT] = m;
  dims_[kXa] = 0;
  dims_[kTa] = 0;
  for (AgentId i = 0; i < m; ++i) {
    dims_[kXa] += n1 * state_dim_ * graph_.neighborhood_size(i);
    dims_[kTa] += graph_.neighborhood_size(i);
  }
}

bool MasterNode::on_receive(const WorkerUpdate& update) {
  const AgentId w = update.sender;
  if (w < 0 || w >= graph_.num_agents())
    throw std::logic_error("master: unknown sender");
  if (mailbox_[w] && update.worker_clock <= mailbox_[w]->worker_clock) {
    ++duplicates_;
    return false;
  }
  mailbox_[w] = update;
  if (std::find(arrived_.begin(), arrived_.end(), w) == arrived_.end())
    arrived_.push_back(w);
  return true;
}

CommitDecision MasterNode::barrier_check() const {
  CommitDecision d;
  if (static_cast<int>(arrived_.size()) < barrier_S_) return d;
  for (AgentId w = 0; w < graph_.num_agents(); ++w) {
    const bool fresh =
        std::find(arrived_.begin(), arrived_.end(), w) != arrived_.end();
    const int would_be = fresh ? 1 : staleness_[w] + 1;
    if (would_be > delay_bound_) return d;
  }
  d.ready = true;
  d.committed = arrived_;
  std::sort(d.committed.begin(), d.committed.end());
  return d;
}

MasterNode::CommitResult MasterNode::commit() {
  CommitDecision decision = barrier_check();
  if (!decision.ready)
    throw std::logic_error("master: commit without a ready barrier");

  previous_consensus_ = consensus_;
  has_previous_ = true;

  const int m = graph_.num_agents();
  const int p = state_dim_;
  const double mu = penalties_.consensus_state;
  const double gamma = penalties_.consensus_time;

  // global average over deemed neighbors with a mailbox entry
  for (AgentId i = 0; i < m; ++i) {
    Eigen::MatrixXd sum =
        Eigen::MatrixXd::Zero(p, horizon_steps_ + 1);
    double t_sum = 0.0;
    int heard = 0;
    for (AgentId j : graph_.deemed[i]) {
      if (!mailbox_[j]) continue;
      const int slot = graph_.slot_of(j, i);
      const WorkerUpdate& upd = *mailbox_[j];
      sum += upd.x_tilde_aug.middleRows(slot * p, p) +
             upd.y.middleRows(slot * p, p) / mu;
      t_sum += upd.t_tilde_aug[slot] + upd.eta[slot] / gamma;
      ++heard;
    }
    if (heard > 0) {
      consensus_.z[i] = sum / heard;
      consensus_.s[i] = t_sum / heard;
    }
  }

  CommitResult out;
  out.committed = decision.committed;
  clock_ += 1;
  for (AgentId w = 0; w < m; ++w) {
    const bool fresh = std::find(decision.committed.begin(),
                                 decision.committed.end(),
                                 w) != decision.committed.end();
    staleness_[w] = fresh ? 1 : staleness_[w] + 1;
  }
  arrived_.clear();

  for (AgentId w : decision.committed)
    out.broadcasts.emplace_back(w, broadcast_for(w));

  // residual assembly from the mailbox components plus the z/s change
  std::vector<ResidualComponents> comps;
  bool all_heard = true;
  for (AgentId w = 0; w < m; ++w) {
    if (mailbox_[w])
      comps.push_back(mailbox_[w]->residuals);
    else
      all_heard = false;
  }
  double za_change = 0, za_norm = 0, sa_change = 0, sa_norm = 0;
  for (AgentId i = 0; i < m; ++i) {
    const double count = static_cast<double>(graph_.deemed[i].size());
    za_norm += count * consensus_.z[i].squaredNorm();
    sa_norm += count * consensus_.s[i] * consensus_.s[i];
    if (has_previous_) {
      za_change +=
          count * (consensus_.z[i] - previous_consensus_.z[i]).squaredNorm();
      const double ds = consensus_.s[i] - previous_consensus_.s[i];
      sa_change += count * ds * ds;
    }
  }
  out.report = assemble_residuals(comps, penalties_, za_change, za_norm,
                                  sa_change, sa_norm, dims_, clock_);
  if (!all_heard) out.report.complete = false;
  return out;
}

GlobalBroadcast MasterNode::broadcast_for(AgentId worker) const {
  GlobalBroadcast b;
  b.master_clock = clock_;
  const auto& set = graph_.neighbors[worker];
  b.z_aug.resize(static_cast<int>(set.size()) * state_dim_,
                 horizon_steps_ + 1);
  b.s_aug.resize(set.size());
  int at = 0;
  for (size_t s = 0; s < set.size(); ++s) {
    b.z_aug.middleRows(at, state_dim_) = consensus_.z[set[s]];
    b.s_aug[s] = consensus_.s[set[s]];
    at += state_dim_;
  }
  return b;
}

}  // namespace swarm

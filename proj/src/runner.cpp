#include "swarmopt/runner.hpp"

#include <chrono>
#include <future>
#include <map>

#include "swarmopt/network.hpp"

namespace swarm {

WorkerParams make_worker_params(const ScenarioConfig& config,
                                const NeighborGraph& graph, AgentId agent) {
  const int p = UnicycleModel::state_dim;
  WorkerParams wp;
  wp.target_state = config.agents[agent].target;
  wp.W_N = config.terminal_weight * Eigen::MatrixXd::Identity(p, p);
  wp.W_s = config.state_weight * Eigen::MatrixXd::Identity(p, p);
  wp.R = config.control_weight *
         Eigen::MatrixXd::Identity(UnicycleModel::control_dim,
                                   UnicycleModel::control_dim);
  wp.t_min = config.t_min;
  wp.t_max = config.t_max;
  wp.damping = config.damping;
  wp.pddp_max_iters = config.pddp_max_iters;
  wp.pddp_cost_tol = config.pddp_cost_tol;
  wp.init_max_iters = config.init_max_iters;
  wp.obstacles = config.obstacles;
  wp.prox = config.prox;
  wp.penalties = config.penalties;

  const auto& set = graph.neighbors[agent];
  wp.block_sizes.assign(set.size(), p);
  wp.seq.t_delta.resize(static_cast<int>(set.size()) - 1);
  wp.seq.relax_eps.resize(static_cast<int>(set.size()) - 1);
  for (size_t s = 1; s < set.size(); ++s) {
    wp.seq.t_delta[s - 1] =
        config.seq_interval *
        (config.rank_of(agent) - config.rank_of(set[s]));
    wp.seq.relax_eps[s - 1] = config.seq_relax_eps;
  }
  return wp;
}

namespace {

enum class Phase { Computing, Waiting, Stopped };

struct SimEvent {
  enum Type { ComputeDone, DeliverUpdate, DeliverBroadcast, RetryTimer };
  Type type;
  int worker = -1;
  std::shared_future<WorkerIterationResult> compute;
  WorkerUpdate update;
  GlobalBroadcast broadcast;
  long retry_clock = -1;
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& config, const RunOptions& options)
      : config_(config.effective()),
        options_(options),
        graph_(build_neighbor_graph(config_.initial_positions(),
                                    config_.neighborhood_size)),
        network_({config_.p_con, config_.seed, config_.link_latency,
                  config_.retry_backoff, config_.latency_min,
                  config_.latency_max, config_.symmetric_loss},
                 &trace_) {}

  RunResult run() {
    const auto wall_start = std::chrono::steady_clock::now();
    const int m = config_.num_agents();
    const UnicycleModel model(config_.speed, config_.horizon_steps,
                              config_.omega_max);

    workers_.reserve(m);
    for (AgentId i = 0; i < m; ++i)
      workers_.emplace_back(i, model, make_worker_params(config_, graph_, i));

    // initial unconstrained solves; independent, so they may run in
    // parallel without affecting the result
    {
      std::vector<std::future<void>> inits;
      for (AgentId i = 0; i < m; ++i)
        inits.push_back(std::async(
            options_.threaded ? std::launch::async : std::launch::deferred,
            [this, i] {
              workers_[i].init_local(config_.agents[i].initial,
                                     config_.theta_guess);
            }));
      for (auto& f : inits) f.get();
    }
    for (AgentId i = 0; i < m; ++i) {
      std::vector<Eigen::MatrixXd> nb_states;
      std::vector<double> nb_times;
      for (size_t s = 1; s < graph_.neighbors[i].size(); ++s) {
        const AgentId j = graph_.neighbors[i][s];
        nb_states.push_back(workers_[j].safe().x_tilde);
        nb_times.push_back(workers_[j].safe().t_tilde);
      }
      workers_[i].finish_init(nb_states, nb_times);
    }

    ConsensusState init_consensus;
    init_consensus.s.resize(m);
    for (AgentId i = 0; i < m; ++i) {
      init_consensus.z.push_back(workers_[i].safe().x_tilde);
      init_consensus.s[i] = workers_[i].safe().t_tilde;
    }
    master_ = std::make_unique<MasterNode>(
        graph_, std::move(init_consensus), config_.barrier_S,
        config_.delay_bound, UnicycleModel::state_dim, config_.horizon_steps,
        config_.penalties);

    phase_.assign(m, Phase::Computing);
    cached_update_.resize(m);
    for (AgentId i = 0; i < m; ++i) schedule_compute(0.0, i);

    while (!queue_.empty()) {
      auto node = queue_.extract(queue_.begin());
      const double now = node.key().first;
      SimEvent ev = std::move(node.mapped());
      if (now > config_.virtual_time_cap && !shutting_down_) {
        status_ = RunStatus::CapHit;
        begin_shutdown(now);
      }
      dispatch(now, ev);
      virtual_time_ = std::max(virtual_time_, now);
    }

    RunResult res;
    res.status = status_;
    res.commits = master_->clock();
    res.consensus = master_->consensus();
    res.history = std::move(history_);
    res.trace = std::move(trace_);
    res.virtual_time = virtual_time_;
    res.terminal_times.resize(m);
    for (AgentId i = 0; i < m; ++i) {
      const WorkerNode& w = workers_[i];
      Trajectory t;
      t.states = w.safe().x_tilde;
      t.controls = w.safe().u_tilde;
      t.terminal_time = w.safe().t_tilde;
      res.trajectories.push_back(std::move(t));
      res.terminal_times[i] = w.safe().t_tilde;
      res.worker_clocks.push_back(w.clock());
      if (w.status() == WorkerStatus::Degraded) res.any_degraded = true;
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      wall_start)
            .count();
    return res;
  }

 private:
  void enqueue(double time, SimEvent ev) {
    queue_.emplace(std::make_pair(time, next_order_++), std::move(ev));
  }

  void schedule_compute(double now, AgentId w) {
    SimEvent ev;
    ev.type = SimEvent::ComputeDone;
    ev.worker = w;
    const WorkerNode* node = &workers_[w];
    ev.compute = std::async(options_.threaded ? std::launch::async
                                              : std::launch::deferred,
                            [node] { return node->compute_iteration(); })
                     .share();
    phase_[w] = Phase::Computing;
    enqueue(now + network_.worker_latency(w), std::move(ev));
  }

  void send_update(double now, AgentId w) {
    const WorkerUpdate& upd = cached_update_[w];
    if (auto at = network_.worker_send(now, w, upd.worker_clock)) {
      SimEvent dv;
      dv.type = SimEvent::DeliverUpdate;
      dv.worker = w;
      dv.update = upd;
      enqueue(*at, std::move(dv));
    }
    SimEvent rt;
    rt.type = SimEvent::RetryTimer;
    rt.worker = w;
    rt.retry_clock = upd.worker_clock;
    enqueue(now + network_.params().retry_backoff, std::move(rt));
  }

  void begin_shutdown(double now) {
    shutting_down_ = true;
    for (AgentId w = 0; w < config_.num_agents(); ++w) {
      if (phase_[w] == Phase::Stopped) continue;
      if (auto at = network_.master_send(now, w, master_->clock())) {
        SimEvent ev;
        ev.type = SimEvent::DeliverBroadcast;
        ev.worker = w;
        ev.broadcast.shutdown = true;
        ev.broadcast.master_clock = master_->clock();
        enqueue(*at, std::move(ev));
      }
    }
  }

  void dispatch(double now, SimEvent& ev) {
    switch (ev.type) {
      case SimEvent::ComputeDone: {
        const AgentId w = ev.worker;
        WorkerIterationResult result = ev.compute.get();
        if (phase_[w] == Phase::Stopped) {
          // compute finished after the node was shut down
          trace_.append(now, EventKind::Drop, w, w, workers_[w].clock(), -1);
          return;
        }
        trace_.append(now, EventKind::WorkerTick, w, w, workers_[w].clock(),
                      -1);
        cached_update_[w] = workers_[w].commit_iteration(result);
        phase_[w] = Phase::Waiting;
        send_update(now, w);
        return;
      }
      case SimEvent::DeliverUpdate: {
        const AgentId w = ev.worker;
        if (shutting_down_) {
          trace_.append(now, EventKind::Drop, w, kMasterNode,
                        ev.update.worker_clock, -1);
          return;
        }
        trace_.append(now, EventKind::Deliver, w, kMasterNode,
                      ev.update.worker_clock, master_->clock());
        const bool fresh = master_->on_receive(ev.update);
        if (!fresh) {
          // duplicate after a commit that already serviced this worker:
          // evidence its broadcast may be lost, so repeat it
          const auto& arrived = master_->arrived();
          if (std::find(arrived.begin(), arrived.end(), w) == arrived.end() &&
              master_->clock() > 0)
            send_broadcast(now, w, master_->broadcast_for(w));
          return;
        }
        maybe_commit(now);
        return;
      }
      case SimEvent::DeliverBroadcast: {
        const AgentId w = ev.worker;
        if (phase_[w] == Phase::Stopped) {
          trace_.append(now, EventKind::Drop, kMasterNode, w, -1,
                        ev.broadcast.master_clock);
          return;
        }
        trace_.append(now, EventKind::Deliver, kMasterNode, w,
                      workers_[w].clock(), ev.broadcast.master_clock);
        if (ev.broadcast.shutdown) {
          workers_[w].stop();
          phase_[w] = Phase::Stopped;
          return;
        }
        if (phase_[w] != Phase::Waiting) return;  // worker busy computing
        if (workers_[w].apply_broadcast(ev.broadcast))
          schedule_compute(now, w);
        return;
      }
      case SimEvent::RetryTimer: {
        const AgentId w = ev.worker;
        if (phase_[w] != Phase::Waiting || shutting_down_) return;
        if (cached_update_[w].worker_clock != ev.retry_clock) return;
        send_update(now, w);
        return;
      }
    }
  }

  void send_broadcast(double now, AgentId w, const GlobalBroadcast& b) {
    if (auto at = network_.master_send(now, w, b.master_clock)) {
      SimEvent ev;
      ev.type = SimEvent::DeliverBroadcast;
      ev.worker = w;
      ev.broadcast = b;
      enqueue(*at, std::move(ev));
    }
  }

  void maybe_commit(double now) {
    if (!master_->barrier_check().ready) return;
    MasterNode::CommitResult cr = master_->commit();
    trace_.append(now, EventKind::Commit, kMasterNode, kMasterNode, -1,
                  master_->clock());
    history_.push_back(cr.report);

    if (check_stop(cr.report, config_.eps_abs, config_.eps_rel)) {
      status_ = RunStatus::Converged;
      begin_shutdown(now);
      return;
    }
    if (master_->clock() >= config_.commit_cap) {
      status_ = RunStatus::CapHit;
      begin_shutdown(now);
      return;
    }
    for (auto& [w, b] : cr.broadcasts) send_broadcast(now, w, b);
  }

  ScenarioConfig config_;
  RunOptions options_;
  NeighborGraph graph_;
  EventTrace trace_;
  VirtualNetwork network_;
  std::vector<WorkerNode> workers_;
  std::unique_ptr<MasterNode> master_;
  std::vector<Phase> phase_;
  std::vector<WorkerUpdate> cached_update_;
  std::vector<ResidualReport> history_;
  std::map<std::pair<double, std::uint64_t>, SimEvent> queue_;
  std::uint64_t next_order_ = 0;
  bool shutting_down_ = false;
  RunStatus status_ = RunStatus::CapHit;
  double virtual_time_ = 0.0;
};

}  // namespace

RunResult run_swarm(const ScenarioConfig& config, const RunOptions& options) {
  validate_scenario(config);
  Simulation sim(config, options);
  return sim.run();
}

}  // namespace swarm

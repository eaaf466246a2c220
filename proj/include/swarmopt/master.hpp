#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "swarmopt/graph.hpp"
#include "swarmopt/residuals.hpp"
#include "swarmopt/types.hpp"

namespace swarm {

struct CommitDecision {
  bool ready = false;
  std::vector<AgentId> committed;  // the set phi^k when ready
};

/// The consensus coordinator. Keeps the latest update per worker, the
/// committed-since-last-update set, and per-worker staleness counters;
/// commits a global average once the partial barrier and bounded delay
/// conditions hold, then broadcasts only to the workers that arrived.
class MasterNode {
 public:
  MasterNode(const NeighborGraph& graph, ConsensusState initial, int barrier_S,
             int delay_bound, int state_dim, int horizon_steps,
             Penalties penalties);

  /// Mailbox ingestion. Returns false for stale duplicates (sender clock
  /// not newer than the stored one), which are counted but otherwise
  /// ignored.
  bool on_receive(const WorkerUpdate& update);

  /// Partial barrier + bounded delay, evaluated on the staleness values
  /// the commit would produce, so committing never pushes a counter past
  /// the bound.
  CommitDecision barrier_check() const;

  struct CommitResult {
    std::vector<AgentId> committed;
    std::vector<std::pair<AgentId, GlobalBroadcast>> broadcasts;
    ResidualReport report;
  };

  /// The global update: per-agent average of the mailbox copies (stale
  /// ones included; never-heard workers omitted), clock increment,
  /// staleness bookkeeping and broadcasts for the committed set.
  CommitResult commit();

  /// Rebuilds the latest broadcast for one worker (used when evidence of
  /// a lost broadcast shows up).
  GlobalBroadcast broadcast_for(AgentId worker) const;

  long clock() const { return clock_; }
  const ConsensusState& consensus() const { return consensus_; }
  const std::vector<int>& staleness() const { return staleness_; }
  const std::vector<AgentId>& arrived() const { return arrived_; }
  bool heard_from(AgentId worker) const {
    return mailbox_[worker].has_value();
  }
  long duplicate_count() const { return duplicates_; }
  int barrier_S() const { return barrier_S_; }
  int delay_bound() const { return delay_bound_; }
  std::array<double, kResidualKeys> residual_dims() const { return dims_; }

 private:
  NeighborGraph graph_;
  ConsensusState consensus_;
  ConsensusState previous_consensus_;
  bool has_previous_ = false;
  int barrier_S_;
  int delay_bound_;
  int state_dim_;
  int horizon_steps_;
  Penalties penalties_;

  long clock_ = 0;
  std::vector<std::optional<WorkerUpdate>> mailbox_;
  std::vector<AgentId> arrived_;
  std::vector<int> staleness_;
  long duplicates_ = 0;
  std::array<double, kResidualKeys> dims_{};
};

}  // namespace swarm

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "swarmopt/types.hpp"

namespace swarm {

/// Fixed communication topology. neighbors[i] is the ordered set N_i
/// (self first, then ascending id); deemed[i] is P_i = {j : i in N_j},
/// the transpose relation, also ascending.
struct NeighborGraph {
  std::vector<std::vector<AgentId>> neighbors;
  std::vector<std::vector<AgentId>> deemed;

  int num_agents() const { return static_cast<int>(neighbors.size()); }
  int neighborhood_size(AgentId i) const {
    return static_cast<int>(neighbors[i].size());
  }
  /// Position of agent j within N_i, or -1 if absent.
  int slot_of(AgentId i, AgentId j) const;
};

/// Builds N_i as self plus the (neighborhood_size - 1) nearest agents by
/// Euclidean distance at the given initial positions. Distance ties break
/// toward the lower id.
NeighborGraph build_neighbor_graph(const std::vector<Eigen::Vector2d>& positions,
                                   int neighborhood_size);

/// Concatenates values[j] for j in N_i in the graph's neighbor order.
Eigen::VectorXd stack_neighborhood(const std::vector<Eigen::VectorXd>& values,
                                   const NeighborGraph& graph, AgentId agent);

/// Splits a stacked neighborhood vector back into per-neighbor blocks of
/// the given sizes (one size per slot of N_i).
std::vector<Eigen::VectorXd> unstack_neighborhood(
    const Eigen::VectorXd& stacked, const std::vector<int>& block_sizes);

}  // namespace swarm

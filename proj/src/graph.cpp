#include "swarmopt/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace swarm {

int NeighborGraph::slot_of(AgentId i, AgentId j) const {
  const auto& set = neighbors[i];
  for (size_t s = 0; s < set.size(); ++s)
    if (set[s] == j) return static_cast<int>(s);
  return -1;
}

NeighborGraph build_neighbor_graph(const std::vector<Eigen::Vector2d>& positions,
                                   int neighborhood_size) {
  const int m = static_cast<int>(positions.size());
  if (m < 1) throw ConfigError("neighbor graph: need at least one agent");
  if (neighborhood_size < 1)
    throw ConfigError("neighbor graph: neighborhood_size must be >= 1");
  if (neighborhood_size > m)
    throw ConfigError("neighbor graph: neighborhood_size exceeds swarm size");

  NeighborGraph g;
  g.neighbors.resize(m);
  g.deemed.resize(m);

  for (AgentId i = 0; i < m; ++i) {
    std::vector<AgentId> others;
    others.reserve(m - 1);
    for (AgentId j = 0; j < m; ++j)
      if (j != i) others.push_back(j);
    // ties break toward the lower id: stable sort over ids already ascending
    std::stable_sort(others.begin(), others.end(), [&](AgentId a, AgentId b) {
      return (positions[a] - positions[i]).squaredNorm() <
             (positions[b] - positions[i]).squaredNorm();
    });
    std::vector<AgentId> set;
    set.push_back(i);
    set.insert(set.end(), others.begin(),
               others.begin() + (neighborhood_size - 1));
    std::sort(set.begin() + 1, set.end());
    g.neighbors[i] = std::move(set);
  }
  for (AgentId j = 0; j < m; ++j)
    for (AgentId i : g.neighbors[j])
      g.deemed[i].push_back(j);
  for (auto& p : g.deemed) std::sort(p.begin(), p.end());
  return g;
}

Eigen::VectorXd stack_neighborhood(const std::vector<Eigen::VectorXd>& values,
                                   const NeighborGraph& graph, AgentId agent) {
  const auto& set = graph.neighbors[agent];
  Eigen::Index total = 0;
  for (AgentId j : set) {
    if (j < 0 || j >= static_cast<AgentId>(values.size()) ||
        values[j].size() == 0)
      throw std::logic_error("stack_neighborhood: missing neighbor value");
    total += values[j].size();
  }
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (AgentId j : set) {
    out.segment(at, values[j].size()) = values[j];
    at += values[j].size();
  }
  return out;
}

std::vector<Eigen::VectorXd> unstack_neighborhood(
    const Eigen::VectorXd& stacked, const std::vector<int>& block_sizes) {
  std::vector<Eigen::VectorXd> blocks;
  blocks.reserve(block_sizes.size());
  Eigen::Index at = 0;
  for (int sz : block_sizes) {
    if (at + sz > stacked.size())
      throw std::logic_error("unstack_neighborhood: size mismatch");
    blocks.push_back(stacked.segment(at, sz));
    at += sz;
  }
  if (at != stacked.size())
    throw std::logic_error("unstack_neighborhood: size mismatch");
  return blocks;
}

}  // namespace swarm

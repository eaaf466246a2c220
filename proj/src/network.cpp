#include "swarmopt/network.hpp"

namespace swarm {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream_id)
    : key_(mix64(seed ^ mix64(stream_id))) {}

double StreamRng::next_uniform() {
  const std::uint64_t r = mix64(key_ + 0x632be59bd9b4e019ull * ++counter_);
  return static_cast<double>(r >> 11) * 0x1.0p-53;
}

VirtualNetwork::VirtualNetwork(NetworkParams params, EventTrace* trace)
    : params_(params), trace_(trace) {}

StreamRng& VirtualNetwork::stream(std::map<int, StreamRng>& pool, int node,
                                  std::uint64_t tag) {
  auto it = pool.find(node);
  if (it == pool.end())
    it = pool.emplace(node, StreamRng(params_.seed,
                                      (tag << 32) |
                                          static_cast<std::uint32_t>(node)))
             .first;
  return it->second;
}

std::optional<double> VirtualNetwork::worker_send(double now, int worker,
                                                  long worker_clock) {
  trace_->append(now, EventKind::Send, worker, kMasterNode, worker_clock, -1);
  const bool delivered =
      stream(up_links_, worker, 1).next_uniform() < params_.p_con;
  if (!delivered) {
    trace_->append(now, EventKind::Drop, worker, kMasterNode, worker_clock, -1);
    return std::nullopt;
  }
  return now + params_.link_latency;
}

std::optional<double> VirtualNetwork::master_send(double now, int worker,
                                                  long master_clock) {
  trace_->append(now, EventKind::Send, kMasterNode, worker, -1, master_clock);
  if (params_.symmetric_loss) {
    const bool delivered =
        stream(down_links_, worker, 3).next_uniform() < params_.p_con;
    if (!delivered) {
      trace_->append(now, EventKind::Drop, kMasterNode, worker, -1,
                     master_clock);
      return std::nullopt;
    }
  }
  return now + params_.link_latency;
}

double VirtualNetwork::worker_latency(int worker) {
  const double u = stream(latencies_, worker, 2).next_uniform();
  return params_.latency_min + u * (params_.latency_max - params_.latency_min);
}

}  // namespace swarm

#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "swarmopt/event_trace.hpp"

namespace swarm {

/// Counter-based random stream: the n-th draw is a hash of
/// (seed, stream id, n), so streams are independent and adding streams
/// never perturbs existing ones.
class StreamRng {
 public:
  StreamRng() = default;
  StreamRng(std::uint64_t seed, std::uint64_t stream_id);
  double next_uniform();  // in [0, 1)

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

struct NetworkParams {
  double p_con = 1.0;
  std::uint64_t seed = 0;
  double link_latency = 0.1;
  double retry_backoff = 2.0;
  double latency_min = 1.0;  // per-iteration worker compute time range
  double latency_max = 2.0;
  bool symmetric_loss = false;  // default: only worker->master lossy
};

/// Bernoulli link model over virtual time. Worker->master sends succeed
/// with probability p_con; broadcasts are reliable unless symmetric loss
/// is enabled. Every attempt appends a send record and, on failure, a
/// drop record to the trace.
class VirtualNetwork {
 public:
  VirtualNetwork(NetworkParams params, EventTrace* trace);

  /// Returns the delivery time, or nullopt if the message was dropped.
  std::optional<double> worker_send(double now, int worker, long worker_clock);
  std::optional<double> master_send(double now, int worker, long master_clock);

  /// Next compute duration for one worker iteration, drawn uniformly
  /// from [latency_min, latency_max].
  double worker_latency(int worker);

  const NetworkParams& params() const { return params_; }

 private:
  StreamRng& stream(std::map<int, StreamRng>& pool, int node,
                    std::uint64_t tag);

  NetworkParams params_;
  EventTrace* trace_;
  std::map<int, StreamRng> up_links_;
  std::map<int, StreamRng> down_links_;
  std::map<int, StreamRng> latencies_;
};

}  // namespace swarm

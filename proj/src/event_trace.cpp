#include "swarmopt/event_trace.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace swarm {

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::Send:
      return "send";
    case EventKind::Drop:
      return "drop";
    case EventKind::Deliver:
      return "deliver";
    case EventKind::Commit:
      return "commit";
    case EventKind::WorkerTick:
      return "worker_tick";
  }
  return "?";
}

void EventTrace::append(double time, EventKind kind, int from, int to,
                        long worker_clock, long master_clock) {
  records_.push_back({time, static_cast<std::uint64_t>(records_.size()), kind,
                      from, to, worker_clock, master_clock});
}

void EventTrace::write(std::ostream& os) const {
  char line[160];
  for (const EventRecord& r : records_) {
    std::snprintf(line, sizeof(line), "%.9f,%" PRIu64 ",%s,%d,%d,%ld,%ld\n",
                  r.time, r.seq, event_kind_name(r.kind), r.from, r.to,
                  r.worker_clock, r.master_clock);
    os << line;
  }
}

std::string EventTrace::to_string() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

std::uint64_t EventTrace::hash() const {
  // FNV-1a over the serialized form
  const std::string s = to_string();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace swarm

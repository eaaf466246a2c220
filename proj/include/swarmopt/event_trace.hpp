#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace swarm {

/// Node id used for the master in trace records.
constexpr int kMasterNode = -1;

enum class EventKind { Send, Drop, Deliver, Commit, WorkerTick };

const char* event_kind_name(EventKind kind);

struct EventRecord {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Send;
  int from = kMasterNode;
  int to = kMasterNode;
  long worker_clock = -1;
  long master_clock = -1;
};

/// Totally ordered, replayable log of every protocol event. Records are
/// appended in dispatch order; seq is assigned on append.
class EventTrace {
 public:
  void append(double time, EventKind kind, int from, int to, long worker_clock,
              long master_clock);
  const std::vector<EventRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  void write(std::ostream& os) const;
  std::string to_string() const;
  std::uint64_t hash() const;

 private:
  std::vector<EventRecord> records_;
};

}  // namespace swarm

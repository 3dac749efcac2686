#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "crossguard/controller_json.hpp"
#include "crossguard/time.hpp"

namespace crossguard {

// One line of the append-only run log:
//   {"seq":7,"t_ms":1200,"source":"controller","payload":{"type":"command",...}}
struct EventLogRecord {
  std::uint64_t seq = 0;
  Millis t{0};
  std::string source;
  Json payload;

  std::string to_line() const;
  static EventLogRecord from_line(const std::string& line);
};

class EventLog {
 public:
  // Assigns the next sequence number. Throws std::logic_error if `t` is
  // earlier than the previous record.
  const EventLogRecord& append(Millis t, std::string source, Json payload);

  const std::vector<EventLogRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  void write_jsonl(std::ostream& out) const;
  std::string to_jsonl() const;
  // Throws ParseError on malformed lines and OrderingError when sequence
  // numbers or timestamps go backwards.
  static EventLog read_jsonl(std::istream& in);

 private:
  std::vector<EventLogRecord> records_;
};

}  // namespace crossguard

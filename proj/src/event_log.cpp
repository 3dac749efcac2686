#include "crossguard/event_log.hpp"

#include <sstream>
#include <stdexcept>

#include "crossguard/errors.hpp"

namespace crossguard {

std::string EventLogRecord::to_line() const {
  Json j;
  j["seq"] = seq;
  j["t_ms"] = t.count();
  j["source"] = source;
  j["payload"] = payload;
  return j.dump();
}

EventLogRecord EventLogRecord::from_line(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError("", std::string("malformed log record: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("", "log record is not an object");
  for (const char* key : {"seq", "t_ms", "source", "payload"}) {
    if (!j.contains(key)) throw ParseError(key, "missing");
  }
  if (!j["seq"].is_number_unsigned()) throw ParseError("seq", "must be a non-negative integer");
  if (!j["t_ms"].is_number_integer()) throw ParseError("t_ms", "must be an integer");
  if (!j["source"].is_string()) throw ParseError("source", "must be a string");
  return EventLogRecord{j["seq"].get<std::uint64_t>(), Millis{j["t_ms"].get<std::int64_t>()},
                        j["source"].get<std::string>(), j["payload"]};
}

const EventLogRecord& EventLog::append(Millis t, std::string source, Json payload) {
  if (!records_.empty() && t < records_.back().t) {
    throw std::logic_error("event log time went backwards: " + std::to_string(t.count()) + " < " +
                           std::to_string(records_.back().t.count()));
  }
  const std::uint64_t seq = records_.empty() ? 1 : records_.back().seq + 1;
  records_.push_back(EventLogRecord{seq, t, std::move(source), std::move(payload)});
  return records_.back();
}

void EventLog::write_jsonl(std::ostream& out) const {
  for (const auto& r : records_) out << r.to_line() << '\n';
}

std::string EventLog::to_jsonl() const {
  std::ostringstream out;
  write_jsonl(out);
  return out.str();
}

EventLog EventLog::read_jsonl(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    EventLogRecord r;
    try {
      r = EventLogRecord::from_line(line);
    } catch (const ParseError& e) {
      throw ParseError(e.field(), "line " + std::to_string(line_no) + ": " + e.detail());
    }
    if (!log.records_.empty()) {
      const auto& prev = log.records_.back();
      if (r.seq <= prev.seq) {
        throw OrderingError("line " + std::to_string(line_no) + ": sequence number not increasing");
      }
      if (r.t < prev.t) {
        throw OrderingError("line " + std::to_string(line_no) + ": timestamp went backwards");
      }
    }
    log.records_.push_back(std::move(r));
  }
  return log;
}

}  // namespace crossguard

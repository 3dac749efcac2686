#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossguard/event_log.hpp"
#include "crossguard/notify.hpp"

namespace crossguard {

struct TrainOutcome {
  std::string train_id;
  Millis arrival{0};
  std::optional<Millis> cleared;
  std::optional<Millis> barrier_closed_at;  // start of the closure covering the arrival
  std::optional<double> margin_s;
  bool safe = false;
};

struct EscalationStep {
  std::uint32_t incident_id = 0;
  Millis at{0};
  AlarmLevel level = AlarmLevel::VoiceAlert;
};

struct IncidentRecord {
  std::uint32_t id = 0;
  std::string kind;
  Millis started{0};
  std::optional<Millis> ended;
  std::string end_reason;  // "cleared" or "scenario_end"
};

struct MessageRecord {
  DistressMessage message;
  std::vector<std::string> recipients;
  std::vector<DeliveryReceipt> receipts;
};

struct ChannelStats {
  std::string channel;
  std::uint64_t frames = 0;
  std::uint64_t truth_frames = 0;
  std::uint64_t detected_on_truth = 0;
  std::uint64_t false_positives = 0;
  // Sliding windows of n frames with the target present throughout.
  std::uint64_t windows = 0;
  std::uint64_t windows_confirmed = 0;

  std::optional<double> per_frame_accuracy() const;
  std::optional<double> windowed_accuracy() const;
};

struct Violation {
  Millis at{0};
  std::string train_id;
  std::string reason;
};

struct RunReport {
  std::string scenario_id;
  std::uint64_t seed = 0;
  int confirmed_trains = 0;
  int phantom_tracks = 0;
  std::vector<Millis> barrier_closed;
  std::vector<Millis> barrier_opened;
  std::vector<TrainOutcome> trains;
  std::vector<EscalationStep> escalations;
  std::vector<IncidentRecord> incidents;
  std::vector<MessageRecord> messages;
  std::vector<ChannelStats> channels;
  std::vector<Violation> violations;
  std::map<std::string, double> schedule_deviation_s;
  int head_on_conflicts = 0;

  bool safe() const { return violations.empty(); }
  Json to_json() const;
};

// Folds log records into a report; a run and a replay of its log agree.
class ReportBuilder {
 public:
  void consume(const EventLogRecord& record);
  RunReport finish() const;

 private:
  struct Window {
    std::deque<std::pair<bool, bool>> frames;  // (truth, detected)
  };

  RunReport report_;
  int window_len_ = 10;
  int required_hits_ = 1;
  std::map<std::string, std::size_t> channel_index_;
  std::map<std::string, Window> windows_;
};

RunReport build_report(const EventLog& log);

}  // namespace crossguard

#include "crossguard/report.hpp"

#include <algorithm>

namespace crossguard {
namespace {

Json optional_ms(const std::optional<Millis>& t) { return t ? Json(t->count()) : Json(nullptr); }

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

DeliveryReceipt receipt_from_json(const Json& j) {
  return DeliveryReceipt{j.at("message_id").get<std::string>(), j.at("recipient_id").get<std::string>(),
                         j.at("attempts").get<int>(),
                         j.at("outcome").get<std::string>() == "Delivered" ? DeliveryOutcome::Delivered
                                                                           : DeliveryOutcome::Failed,
                         Millis{j.at("completed_ms").get<std::int64_t>()}};
}

}  // namespace

std::optional<double> ChannelStats::per_frame_accuracy() const {
  if (truth_frames == 0) return std::nullopt;
  return static_cast<double>(detected_on_truth) / static_cast<double>(truth_frames);
}

std::optional<double> ChannelStats::windowed_accuracy() const {
  if (windows == 0) return std::nullopt;
  return static_cast<double>(windows_confirmed) / static_cast<double>(windows);
}

void ReportBuilder::consume(const EventLogRecord& record) {
  const auto& p = record.payload;
  const auto type = p.value("type", std::string{});
  const auto& source = record.source;

  if (source == "sim") {
    if (type == "run_start") {
      const auto& scenario = p.at("scenario");
      report_.scenario_id = scenario.at("id").get<std::string>();
      report_.seed = p.at("seed").get<std::uint64_t>();
      window_len_ = scenario.at("confirmation").at("window").get<int>();
      required_hits_ = scenario.at("confirmation").at("hits").get<int>();
    } else if (type == "violation") {
      report_.violations.push_back(
          Violation{record.t, p.at("train_id").get<std::string>(), p.at("reason").get<std::string>()});
    }
  } else if (source == "world") {
    if (type == "barrier") {
      const auto state = p.at("state").get<std::string>();
      if (state == "down") report_.barrier_closed.push_back(record.t);
      if (state == "up") report_.barrier_opened.push_back(record.t);
    } else if (type == "train_arrival") {
      TrainOutcome t;
      t.train_id = p.at("train_id").get<std::string>();
      t.arrival = record.t;
      if (!p.at("closed_ms").is_null()) t.barrier_closed_at = Millis{p.at("closed_ms").get<std::int64_t>()};
      if (!p.at("margin_s").is_null()) t.margin_s = p.at("margin_s").get<double>();
      t.safe = p.at("safe").get<bool>();
      report_.trains.push_back(std::move(t));
    } else if (type == "train_cleared") {
      const auto id = p.at("train_id").get<std::string>();
      for (auto& t : report_.trains) {
        if (t.train_id == id && !t.cleared) t.cleared = record.t;
      }
    }
  } else if (source == "detector" && type == "observation") {
    const auto& obs = p.at("obs");
    const auto channel = obs.at("src").get<std::string>();
    const bool truth = p.at("truth").get<bool>();
    const bool detected = obs.at("det").get<bool>();
    auto [it, inserted] = channel_index_.emplace(channel, report_.channels.size());
    if (inserted) report_.channels.push_back(ChannelStats{channel});
    auto& stats = report_.channels[it->second];
    ++stats.frames;
    if (truth) {
      ++stats.truth_frames;
      stats.detected_on_truth += detected ? 1 : 0;
    } else {
      stats.false_positives += detected ? 1 : 0;
    }
    auto& w = windows_[channel].frames;
    w.emplace_back(truth, detected);
    if (static_cast<int>(w.size()) > window_len_) w.pop_front();
    if (static_cast<int>(w.size()) == window_len_ &&
        std::all_of(w.begin(), w.end(), [](const auto& f) { return f.first; })) {
      ++stats.windows;
      const auto hits = std::count_if(w.begin(), w.end(), [](const auto& f) { return f.second; });
      stats.windows_confirmed += hits >= required_hits_ ? 1 : 0;
    }
  } else if (source == "kinematics") {
    if (type == "track") {
      if (p.at("new").get<bool>()) {
        (p.at("phantom").get<bool>() ? report_.phantom_tracks : report_.confirmed_trains) += 1;
      }
    } else if (type == "schedule_deviation") {
      report_.schedule_deviation_s[p.at("train_id").get<std::string>()] = p.at("deviation_s").get<double>();
    } else if (type == "conflict") {
      ++report_.head_on_conflicts;
    }
  } else if (source == "controller") {
    if (type == "incident") {
      const auto& inc = p.at("incident");
      const auto id = inc.at("id").get<std::uint32_t>();
      if (p.at("status").get<std::string>() == "started") {
        report_.incidents.push_back(IncidentRecord{id, inc.at("kind").get<std::string>(),
                                                   Millis{inc.at("started_ms").get<std::int64_t>()},
                                                   std::nullopt, {}});
      } else {
        for (auto& r : report_.incidents) {
          if (r.id == id && !r.ended) {
            r.ended = record.t;
            r.end_reason = p.at("reason").get<std::string>();
          }
        }
      }
    } else if (type == "escalation") {
      report_.escalations.push_back(EscalationStep{p.at("incident_id").get<std::uint32_t>(), record.t,
                                                   parse_alarm_level(p.at("level").get<std::string>())});
    }
  } else if (source == "notify" && type == "dispatch") {
    MessageRecord m{message_from_json(p.at("message")), {}, {}};
    for (const auto& r : p.at("recipients")) m.recipients.push_back(r.get<std::string>());
    for (const auto& r : p.at("receipts")) m.receipts.push_back(receipt_from_json(r));
    report_.messages.push_back(std::move(m));
  }
}

RunReport ReportBuilder::finish() const { return report_; }

RunReport build_report(const EventLog& log) {
  ReportBuilder builder;
  for (const auto& r : log.records()) builder.consume(r);
  return builder.finish();
}

Json RunReport::to_json() const {
  Json j;
  j["scenario_id"] = scenario_id;
  j["seed"] = seed;
  j["safe"] = safe();
  j["confirmed_trains"] = confirmed_trains;
  j["phantom_tracks"] = phantom_tracks;

  Json closed = Json::array();
  for (auto t : barrier_closed) closed.push_back(t.count());
  Json opened = Json::array();
  for (auto t : barrier_opened) opened.push_back(t.count());
  j["barrier"] = {{"closed_ms", std::move(closed)}, {"opened_ms", std::move(opened)}};

  j["trains"] = Json::array();
  for (const auto& t : trains) {
    j["trains"].push_back({{"train_id", t.train_id},
                           {"arrival_ms", t.arrival.count()},
                           {"cleared_ms", optional_ms(t.cleared)},
                           {"barrier_closed_ms", optional_ms(t.barrier_closed_at)},
                           {"margin_s", optional_number(t.margin_s)},
                           {"safe", t.safe}});
  }
  j["escalations"] = Json::array();
  for (const auto& e : escalations) {
    j["escalations"].push_back({{"incident_id", e.incident_id},
                                {"t_ms", e.at.count()},
                                {"level", std::string(to_string(e.level))}});
  }
  j["incidents"] = Json::array();
  for (const auto& i : incidents) {
    j["incidents"].push_back({{"id", i.id},
                              {"kind", i.kind},
                              {"started_ms", i.started.count()},
                              {"ended_ms", optional_ms(i.ended)},
                              {"end_reason", i.ended ? Json(i.end_reason) : Json(nullptr)}});
  }
  j["messages"] = Json::array();
  for (const auto& m : messages) {
    Json receipts = Json::array();
    for (const auto& r : m.receipts) receipts.push_back(crossguard::to_json(r));
    j["messages"].push_back({{"message", crossguard::to_json(m.message)},
                             {"recipients", m.recipients},
                             {"receipts", std::move(receipts)}});
  }
  j["detection"] = Json::array();
  for (const auto& c : channels) {
    j["detection"].push_back({{"channel", c.channel},
                              {"frames", c.frames},
                              {"truth_frames", c.truth_frames},
                              {"detected_on_truth", c.detected_on_truth},
                              {"false_positives", c.false_positives},
                              {"per_frame_accuracy", optional_number(c.per_frame_accuracy())},
                              {"windows", c.windows},
                              {"windows_confirmed", c.windows_confirmed},
                              {"windowed_accuracy", optional_number(c.windowed_accuracy())}});
  }
  j["schedule_deviation_s"] = Json::object();
  for (const auto& [id, d] : schedule_deviation_s) j["schedule_deviation_s"][id] = d;
  j["head_on_conflicts"] = head_on_conflicts;
  j["violations"] = Json::array();
  for (const auto& v : violations) {
    j["violations"].push_back({{"t_ms", v.at.count()}, {"train_id", v.train_id}, {"reason", v.reason}});
  }
  return j;
}

}  // namespace crossguard

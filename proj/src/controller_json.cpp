#include "crossguard/controller_json.hpp"

#include "crossguard/errors.hpp"

namespace crossguard {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> number_or_null(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

IncidentKind parse_incident_kind(const std::string& text) {
  if (text == "Trespass") return IncidentKind::Trespass;
  if (text == "SuspiciousActivity") return IncidentKind::SuspiciousActivity;
  throw ArgumentError("unknown incident kind '" + text + "'");
}

Incident incident_from_json(const Json& j) {
  return Incident{j.at("id").get<std::uint32_t>(), parse_incident_kind(j.at("kind").get<std::string>()),
                  Millis{j.at("started_ms").get<std::int64_t>()}};
}

}  // namespace

Json to_json(const TrackEstimate& e) {
  Json j;
  j["train_id"] = e.train_id;
  j["direction"] = std::string(to_string(e.direction));
  j["velocity_mps"] = optional_number(e.velocity_mps);
  j["position_m"] = e.position_m;
  j["eta_s"] = optional_number(e.eta_s);
  j["estimated_ms"] = e.estimated_at.count();
  return j;
}

TrackEstimate estimate_from_json(const Json& j) {
  TrackEstimate e;
  e.train_id = j.at("train_id").get<std::string>();
  e.direction = parse_direction(j.at("direction").get<std::string>());
  e.velocity_mps = number_or_null(j, "velocity_mps");
  e.position_m = j.at("position_m").get<double>();
  e.eta_s = number_or_null(j, "eta_s");
  e.estimated_at = Millis{j.at("estimated_ms").get<std::int64_t>()};
  return e;
}

Json to_json(const Incident& incident) {
  Json j;
  j["id"] = incident.id;
  j["kind"] = std::string(to_string(incident.kind));
  j["started_ms"] = incident.started_at.count();
  return j;
}

Json to_json(const EventBody& body) {
  Json j;
  j["event"] = std::string(event_name(body));
  std::visit(overloaded{
                 [&](const ev::TrainConfirmed& e) {
                   j["sighting"] = std::string(to_string(e.sighting));
                   j["estimate"] = to_json(e.estimate);
                 },
                 [&](const ev::TrainDeparted& e) { j["train_id"] = e.train_id; },
                 [](const auto&) {},
             },
             body);
  return j;
}

EventBody event_from_json(const Json& j) {
  const auto name = j.at("event").get<std::string>();
  if (name == "TrainConfirmed") {
    const auto sighting =
        j.at("sighting").get<std::string>() == "Junction" ? Sighting::Junction : Sighting::Approach;
    return ev::TrainConfirmed{estimate_from_json(j.at("estimate")), sighting};
  }
  if (name == "TrainDeparted") return ev::TrainDeparted{j.at("train_id").get<std::string>()};
  if (name == "TrespasserConfirmed") return ev::TrespasserConfirmed{};
  if (name == "TrespasserCleared") return ev::TrespasserCleared{};
  if (name == "SuspiciousActivity") return ev::SuspiciousActivity{};
  if (name == "PowerLost") return ev::PowerLost{};
  if (name == "PowerRestored") return ev::PowerRestored{};
  if (name == "WatchdogExpired") return ev::WatchdogExpired{};
  if (name == "ObservationsResumed") return ev::ObservationsResumed{};
  if (name == "TrackClear") return ev::TrackClear{};
  if (name == "BarrierClosedAck") return ev::BarrierClosedAck{};
  if (name == "BarrierOpenedAck") return ev::BarrierOpenedAck{};
  if (name == "Tick") return ev::Tick{};
  throw ArgumentError("unknown controller event '" + name + "'");
}

Json to_json(const Command& command) {
  Json j;
  j["cmd"] = std::string(command_name(command));
  std::visit(overloaded{
                 [&](const cmd::SoundAlarm& c) { j["level"] = std::string(to_string(c.level)); },
                 [&](const cmd::SendDistress& c) {
                   j["incident"] = to_json(c.incident);
                   j["severity"] = std::string(to_string(c.severity));
                 },
                 [&](const cmd::SignalTrain& c) { j["train_id"] = c.train_id; },
                 [](const auto&) {},
             },
             command);
  return j;
}

Command command_from_json(const Json& j) {
  const auto name = j.at("cmd").get<std::string>();
  if (name == "LowerBarrier") return cmd::LowerBarrier{};
  if (name == "RaiseBarrier") return cmd::RaiseBarrier{};
  if (name == "SoundAlarm") return cmd::SoundAlarm{parse_alarm_level(j.at("level").get<std::string>())};
  if (name == "StopAlarm") return cmd::StopAlarm{};
  if (name == "IndicatorOn") return cmd::IndicatorOn{};
  if (name == "IndicatorOff") return cmd::IndicatorOff{};
  if (name == "SendDistress") {
    return cmd::SendDistress{incident_from_json(j.at("incident")),
                             parse_alarm_level(j.at("severity").get<std::string>())};
  }
  if (name == "SignalTrain") return cmd::SignalTrain{j.at("train_id").get<std::string>()};
  throw ArgumentError("unknown command '" + name + "'");
}

Json to_json(const ControllerState& s) {
  Json j;
  j["phase"] = std::string(to_string(s.phase));
  Json trains = Json::array();
  for (const auto& [id, t] : s.trains) {
    Json tj = to_json(t.estimate);
    tj["at_junction"] = t.at_junction;
    trains.push_back(std::move(tj));
  }
  j["trains"] = std::move(trains);
  j["trespasser_present"] = s.trespasser_present;
  j["suspicious"] = s.suspicious;
  if (s.incident) {
    Json ij = to_json(s.incident->incident);
    ij["level"] = s.incident->level ? Json(std::string(to_string(*s.incident->level))) : Json(nullptr);
    j["incident"] = std::move(ij);
  } else {
    j["incident"] = nullptr;
  }
  j["power_lost"] = s.power_lost;
  j["watchdog_expired"] = s.watchdog_expired;
  j["barrier_down"] = s.barrier_down;
  return j;
}

}  // namespace crossguard

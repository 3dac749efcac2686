#include "crossguard/controller.hpp"

#include <algorithm>
#include <spdlog/spdlog.h>

#include "crossguard/errors.hpp"

namespace crossguard {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Sound to play while the barrier is down: the siren once an incident has
// reached it, the voice alert otherwise.
AlarmLevel warning_sound(const ControllerState& s) {
  const bool siren = s.incident && s.incident->level && *s.incident->level >= AlarmLevel::Siren;
  return siren ? AlarmLevel::Siren : AlarmLevel::VoiceAlert;
}

std::vector<Command> close_commands(const ControllerState& s) {
  return {cmd::LowerBarrier{}, cmd::SoundAlarm{warning_sound(s)}, cmd::IndicatorOn{}};
}

const std::vector<Command>& open_commands() {
  static const std::vector<Command> cmds{cmd::RaiseBarrier{}, cmd::StopAlarm{}, cmd::IndicatorOff{}};
  return cmds;
}

const std::vector<Command>& fail_safe_commands() {
  static const std::vector<Command> cmds{cmd::LowerBarrier{}, cmd::SoundAlarm{AlarmLevel::Siren},
                                         cmd::IndicatorOn{}};
  return cmds;
}

void append(std::vector<Command>& out, const std::vector<Command>& cmds) {
  out.insert(out.end(), cmds.begin(), cmds.end());
}

bool any_at_junction(const ControllerState& s) {
  return std::any_of(s.trains.begin(), s.trains.end(),
                     [](const auto& kv) { return kv.second.at_junction; });
}

// Phase once the barrier is known to be down and trains remain.
JunctionState protected_phase(const ControllerState& s) {
  return any_at_junction(s) ? JunctionState::TrainPassing : JunctionState::Closed;
}

// Runs the escalation ladder up to the level due at `now`.
void escalate(ControllerState& s, Millis now, const ControllerConfig& cfg,
              std::vector<Command>& out) {
  const bool engaged = barrier_engaged(s.phase);
  if (!s.incident && s.trespasser_present && (engaged || s.suspicious)) {
    const auto kind = s.suspicious ? IncidentKind::SuspiciousActivity : IncidentKind::Trespass;
    s.incident = ActiveIncident{Incident{s.next_incident_id++, kind, now}, std::nullopt};
  }
  if (!s.incident) return;
  // While the road is open a plain trespass is ordinary traffic; the ladder
  // resumes where it stopped when the barrier comes down again.
  if (!engaged && !s.suspicious) return;

  auto target = escalation_level(now - s.incident->incident.started_at, nearest_eta(s, now), cfg);
  if (s.suspicious) target = std::max(target, AlarmLevel::Distress);
  const auto from = s.incident->level;
  if (from && target <= *from) return;

  auto reached = [&](AlarmLevel l) { return (!from || l > *from) && l <= target; };
  if (reached(AlarmLevel::Siren)) {
    out.emplace_back(cmd::SoundAlarm{AlarmLevel::Siren});
  } else if (reached(AlarmLevel::VoiceAlert) && s.phase != JunctionState::FailSafe) {
    out.emplace_back(cmd::SoundAlarm{AlarmLevel::VoiceAlert});
  }
  if (reached(AlarmLevel::Distress)) {
    out.emplace_back(cmd::SendDistress{s.incident->incident, AlarmLevel::Distress});
  }
  if (reached(AlarmLevel::TrainEmergency)) {
    out.emplace_back(cmd::SendDistress{s.incident->incident, AlarmLevel::TrainEmergency});
    for (const auto& [id, _] : s.trains) out.emplace_back(cmd::SignalTrain{id});
  }
  s.incident->level = target;
}

void enter_fail_safe(ControllerState& s, std::vector<Command>& out) {
  s.phase = JunctionState::FailSafe;
  append(out, fail_safe_commands());
}

void open_junction(ControllerState& s, std::vector<Command>& out) {
  s.phase = JunctionState::Opening;
  append(out, open_commands());
}

}  // namespace

std::string_view to_string(JunctionState s) {
  switch (s) {
    case JunctionState::Open: return "Open";
    case JunctionState::Closing: return "Closing";
    case JunctionState::Closed: return "Closed";
    case JunctionState::TrainPassing: return "TrainPassing";
    case JunctionState::Opening: return "Opening";
    case JunctionState::FailSafe: return "FailSafe";
  }
  return "?";
}

std::string_view to_string(AlarmLevel l) {
  switch (l) {
    case AlarmLevel::VoiceAlert: return "VoiceAlert";
    case AlarmLevel::Siren: return "Siren";
    case AlarmLevel::Distress: return "Distress";
    case AlarmLevel::TrainEmergency: return "TrainEmergency";
  }
  return "?";
}

std::string_view to_string(Sighting s) { return s == Sighting::Approach ? "Approach" : "Junction"; }

std::string_view to_string(IncidentKind k) {
  return k == IncidentKind::Trespass ? "Trespass" : "SuspiciousActivity";
}

JunctionState parse_junction_state(std::string_view text) {
  for (auto s : {JunctionState::Open, JunctionState::Closing, JunctionState::Closed,
                 JunctionState::TrainPassing, JunctionState::Opening, JunctionState::FailSafe}) {
    if (to_string(s) == text) return s;
  }
  throw ArgumentError("unknown junction state '" + std::string(text) + "'");
}

AlarmLevel parse_alarm_level(std::string_view text) {
  for (auto l : {AlarmLevel::VoiceAlert, AlarmLevel::Siren, AlarmLevel::Distress,
                 AlarmLevel::TrainEmergency}) {
    if (to_string(l) == text) return l;
  }
  throw ArgumentError("unknown alarm level '" + std::string(text) + "'");
}

std::string_view event_name(const EventBody& body) {
  return std::visit(
      overloaded{
          [](const ev::TrainConfirmed&) { return "TrainConfirmed"; },
          [](const ev::TrainDeparted&) { return "TrainDeparted"; },
          [](const ev::TrespasserConfirmed&) { return "TrespasserConfirmed"; },
          [](const ev::TrespasserCleared&) { return "TrespasserCleared"; },
          [](const ev::SuspiciousActivity&) { return "SuspiciousActivity"; },
          [](const ev::PowerLost&) { return "PowerLost"; },
          [](const ev::PowerRestored&) { return "PowerRestored"; },
          [](const ev::WatchdogExpired&) { return "WatchdogExpired"; },
          [](const ev::ObservationsResumed&) { return "ObservationsResumed"; },
          [](const ev::TrackClear&) { return "TrackClear"; },
          [](const ev::BarrierClosedAck&) { return "BarrierClosedAck"; },
          [](const ev::BarrierOpenedAck&) { return "BarrierOpenedAck"; },
          [](const ev::Tick&) { return "Tick"; },
      },
      body);
}

std::string_view command_name(const Command& command) {
  return std::visit(overloaded{
                        [](const cmd::LowerBarrier&) { return "LowerBarrier"; },
                        [](const cmd::RaiseBarrier&) { return "RaiseBarrier"; },
                        [](const cmd::SoundAlarm&) { return "SoundAlarm"; },
                        [](const cmd::StopAlarm&) { return "StopAlarm"; },
                        [](const cmd::IndicatorOn&) { return "IndicatorOn"; },
                        [](const cmd::IndicatorOff&) { return "IndicatorOff"; },
                        [](const cmd::SendDistress&) { return "SendDistress"; },
                        [](const cmd::SignalTrain&) { return "SignalTrain"; },
                    },
                    command);
}

void ControllerConfig::validate() const {
  for (auto d : {barrier_close_duration, t_siren, t_distress, t_train_signal, eta_critical,
                 watchdog_timeout, min_close_margin}) {
    if (d.count() <= 0) throw ArgumentError("controller durations must be positive");
  }
  if (!(t_siren < t_distress && t_distress < t_train_signal)) {
    throw ArgumentError("escalation thresholds must satisfy t_siren < t_distress < t_train_signal");
  }
}

AlarmLevel escalation_level(Millis trespass_elapsed, std::optional<double> eta_remaining_s,
                            const ControllerConfig& cfg) {
  if (trespass_elapsed.count() < 0) throw ArgumentError("trespass elapsed time is negative");
  if (eta_remaining_s && *eta_remaining_s < to_seconds(cfg.eta_critical)) {
    return AlarmLevel::TrainEmergency;
  }
  if (trespass_elapsed >= cfg.t_train_signal) return AlarmLevel::TrainEmergency;
  if (trespass_elapsed >= cfg.t_distress) return AlarmLevel::Distress;
  if (trespass_elapsed >= cfg.t_siren) return AlarmLevel::Siren;
  return AlarmLevel::VoiceAlert;
}

std::optional<double> nearest_eta(const ControllerState& state, Millis now) {
  std::optional<double> best;
  for (const auto& [_, train] : state.trains) {
    auto remaining = train.at_junction ? std::optional<double>{0.0}
                                       : eta_remaining(train.estimate, now);
    if (remaining && (!best || *remaining < *best)) best = remaining;
  }
  return best;
}

Transition handle(const ControllerState& state, const ControllerEvent& event,
                  const ControllerConfig& cfg) {
  const Millis now = event.at;
  if (state.last_event_at && now < *state.last_event_at) {
    throw OrderingError(std::string(event_name(event.body)) + " at " + std::to_string(now.count()) +
                        " ms precedes last handled event at " +
                        std::to_string(state.last_event_at->count()) + " ms");
  }

  ControllerState s = state;
  std::vector<Command> out;
  bool handled = true;

  std::visit(
      overloaded{
          [&](const ev::TrainConfirmed& e) {
            auto& train = s.trains[e.estimate.train_id];
            if (e.estimate.eta_s || !train.estimate.eta_s) train.estimate = e.estimate;
            train.at_junction = train.at_junction || e.sighting == Sighting::Junction;
            switch (s.phase) {
              case JunctionState::Open:
              case JunctionState::Opening:
                s.phase = JunctionState::Closing;
                append(out, close_commands(s));
                break;
              case JunctionState::Closed:
                s.phase = protected_phase(s);
                break;
              default:
                break;
            }
          },
          [&](const ev::TrainDeparted& e) {
            if (s.trains.erase(e.train_id) == 0) {
              handled = false;
              return;
            }
            if (s.phase == JunctionState::Closed || s.phase == JunctionState::TrainPassing) {
              if (s.trains.empty()) {
                open_junction(s, out);
              } else {
                s.phase = protected_phase(s);
              }
            }
            // Closing waits for the barrier acknowledgement; FailSafe waits
            // for recovery.
          },
          [&](const ev::BarrierClosedAck&) {
            if (s.phase == JunctionState::Closing) {
              s.barrier_down = true;
              if (s.trains.empty()) {
                open_junction(s, out);
              } else {
                s.phase = protected_phase(s);
              }
            } else if (s.phase == JunctionState::FailSafe && !s.barrier_down) {
              s.barrier_down = true;
            } else {
              handled = false;
            }
          },
          [&](const ev::BarrierOpenedAck&) {
            if (s.phase != JunctionState::Opening) {
              handled = false;
              return;
            }
            s.barrier_down = false;
            s.phase = JunctionState::Open;
          },
          [&](const ev::TrespasserConfirmed&) {
            if (s.trespasser_present) {
              handled = false;
              return;
            }
            s.trespasser_present = true;
          },
          [&](const ev::TrespasserCleared&) {
            if (!s.trespasser_present && !s.incident) {
              handled = false;
              return;
            }
            const auto level = s.incident ? s.incident->level : std::nullopt;
            s.trespasser_present = false;
            s.suspicious = false;
            s.incident.reset();
            if (!level) return;
            if (s.phase == JunctionState::Open || s.phase == JunctionState::Opening) {
              out.emplace_back(cmd::StopAlarm{});
            } else if (s.phase != JunctionState::FailSafe && *level >= AlarmLevel::Siren) {
              // Back to the ordinary train warning.
              out.emplace_back(cmd::SoundAlarm{AlarmLevel::VoiceAlert});
            }
          },
          [&](const ev::SuspiciousActivity&) {
            s.trespasser_present = true;
            s.suspicious = true;
          },
          [&](const ev::PowerLost&) {
            s.power_lost = true;
            enter_fail_safe(s, out);
          },
          [&](const ev::WatchdogExpired&) {
            s.watchdog_expired = true;
            enter_fail_safe(s, out);
          },
          [&](const ev::PowerRestored&) {
            if (!s.power_lost) {
              handled = false;
              return;
            }
            s.power_lost = false;
          },
          [&](const ev::ObservationsResumed&) {
            if (!s.watchdog_expired) {
              handled = false;
              return;
            }
            s.watchdog_expired = false;
          },
          [&](const ev::TrackClear&) {
            if (s.phase != JunctionState::FailSafe || s.power_lost || s.watchdog_expired) {
              handled = false;
              return;
            }
            if (s.trains.empty()) {
              open_junction(s, out);
            } else if (s.barrier_down) {
              s.phase = protected_phase(s);
              out.emplace_back(cmd::SoundAlarm{warning_sound(s)});
            } else {
              s.phase = JunctionState::Closing;
            }
          },
          [&](const ev::Tick&) {},
      },
      event.body);

  if (!handled) {
    spdlog::debug("controller: ignoring {} in state {}", event_name(event.body),
                  to_string(state.phase));
    return Transition{state, {}, false};
  }

  s.last_event_at = now;
  escalate(s, now, cfg, out);
  if (warning_sound(s) == AlarmLevel::Siren) {
    std::erase_if(out, [](const Command& c) {
      const auto* a = std::get_if<cmd::SoundAlarm>(&c);
      return a && a->level < AlarmLevel::Siren;
    });
  }
  return Transition{std::move(s), std::move(out), true};
}

Transition fail_safe(const ControllerState& state, Fault fault, Millis at,
                     const ControllerConfig& cfg) {
  if (fault == Fault::PowerLost) return handle(state, ControllerEvent{at, ev::PowerLost{}}, cfg);
  return handle(state, ControllerEvent{at, ev::WatchdogExpired{}}, cfg);
}

}  // namespace crossguard

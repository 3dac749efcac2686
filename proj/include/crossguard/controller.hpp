#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crossguard/kinematics.hpp"
#include "crossguard/time.hpp"

namespace crossguard {

enum class JunctionState { Open, Closing, Closed, TrainPassing, Opening, FailSafe };

// Ordered: escalation only moves up while an incident is active.
enum class AlarmLevel { VoiceAlert, Siren, Distress, TrainEmergency };

// Which camera confirmed the train: an upstream detection point or the
// camera watching the junction itself.
enum class Sighting { Approach, Junction };

enum class IncidentKind { Trespass, SuspiciousActivity };

enum class Fault { PowerLost, WatchdogExpired };

std::string_view to_string(JunctionState s);
std::string_view to_string(AlarmLevel l);
std::string_view to_string(Sighting s);
std::string_view to_string(IncidentKind k);
JunctionState parse_junction_state(std::string_view text);
AlarmLevel parse_alarm_level(std::string_view text);

struct Incident {
  std::uint32_t id = 0;
  IncidentKind kind = IncidentKind::Trespass;
  Millis started_at{0};

  bool operator==(const Incident&) const = default;
};

// Desired actuator states. Re-issuing a command is harmless.
namespace cmd {
struct LowerBarrier {
  bool operator==(const LowerBarrier&) const = default;
};
struct RaiseBarrier {
  bool operator==(const RaiseBarrier&) const = default;
};
struct SoundAlarm {
  AlarmLevel level = AlarmLevel::VoiceAlert;
  bool operator==(const SoundAlarm&) const = default;
};
struct StopAlarm {
  bool operator==(const StopAlarm&) const = default;
};
struct IndicatorOn {
  bool operator==(const IndicatorOn&) const = default;
};
struct IndicatorOff {
  bool operator==(const IndicatorOff&) const = default;
};
struct SendDistress {
  Incident incident;
  AlarmLevel severity = AlarmLevel::Distress;
  bool operator==(const SendDistress&) const = default;
};
struct SignalTrain {
  std::string train_id;
  bool operator==(const SignalTrain&) const = default;
};
}  // namespace cmd

using Command = std::variant<cmd::LowerBarrier, cmd::RaiseBarrier, cmd::SoundAlarm, cmd::StopAlarm,
                             cmd::IndicatorOn, cmd::IndicatorOff, cmd::SendDistress,
                             cmd::SignalTrain>;

namespace ev {
struct TrainConfirmed {
  TrackEstimate estimate;
  Sighting sighting = Sighting::Approach;
};
struct TrainDeparted {
  std::string train_id;
};
struct TrespasserConfirmed {};
struct TrespasserCleared {};
// Raised by an external activity-recognition source.
struct SuspiciousActivity {};
struct PowerLost {};
struct PowerRestored {};
struct WatchdogExpired {};
// First observation after a watchdog expiry.
struct ObservationsResumed {};
// Every train camera has reported a full absence window since recovery.
struct TrackClear {};
struct BarrierClosedAck {};
struct BarrierOpenedAck {};
struct Tick {};
}  // namespace ev

using EventBody =
    std::variant<ev::TrainConfirmed, ev::TrainDeparted, ev::TrespasserConfirmed,
                 ev::TrespasserCleared, ev::SuspiciousActivity, ev::PowerLost, ev::PowerRestored,
                 ev::WatchdogExpired, ev::ObservationsResumed, ev::TrackClear,
                 ev::BarrierClosedAck, ev::BarrierOpenedAck, ev::Tick>;

struct ControllerEvent {
  Millis at{0};
  EventBody body;
};

std::string_view event_name(const EventBody& body);
std::string_view command_name(const Command& command);

struct ControllerConfig {
  Millis barrier_close_duration = std::chrono::seconds{10};
  Millis t_siren = std::chrono::seconds{10};
  Millis t_distress = std::chrono::seconds{30};
  Millis t_train_signal = std::chrono::seconds{45};
  Millis eta_critical = std::chrono::seconds{60};
  Millis watchdog_timeout = std::chrono::seconds{3};
  Millis min_close_margin = std::chrono::seconds{30};

  // Throws ArgumentError unless 0 < t_siren < t_distress < t_train_signal and
  // every duration is positive.
  void validate() const;
};

struct TrackedTrain {
  TrackEstimate estimate;
  bool at_junction = false;

  bool operator==(const TrackedTrain&) const = default;
};

struct ActiveIncident {
  Incident incident;
  std::optional<AlarmLevel> level;  // highest level acted on so far

  bool operator==(const ActiveIncident&) const = default;
};

struct ControllerState {
  JunctionState phase = JunctionState::Open;
  std::map<std::string, TrackedTrain> trains;
  bool trespasser_present = false;
  bool suspicious = false;
  std::optional<ActiveIncident> incident;
  std::uint32_t next_incident_id = 1;
  bool power_lost = false;
  bool watchdog_expired = false;
  bool barrier_down = false;  // last barrier acknowledgement was "closed"
  std::optional<Millis> last_event_at;

  bool operator==(const ControllerState&) const = default;
};

struct Transition {
  ControllerState state;
  std::vector<Command> commands;
  // False for (state, event) pairs with no defined transition; `state` is then
  // the input state unchanged.
  bool handled = true;
};

// Pure transition function; the event timestamp is the controller's clock.
// Throws OrderingError if the event is older than the last handled one.
Transition handle(const ControllerState& state, const ControllerEvent& event,
                  const ControllerConfig& cfg);

// Forces FailSafe with the barrier commanded down, from any state.
Transition fail_safe(const ControllerState& state, Fault fault, Millis at,
                     const ControllerConfig& cfg);

// Alarm level for a trespass incident `trespass_elapsed` old. An ETA under
// eta_critical escalates straight to TrainEmergency. Throws ArgumentError on
// negative elapsed time.
AlarmLevel escalation_level(Millis trespass_elapsed, std::optional<double> eta_remaining_s,
                            const ControllerConfig& cfg);

// Smallest remaining ETA over tracked trains; zero for a train at the junction.
std::optional<double> nearest_eta(const ControllerState& state, Millis now);

// Barrier is commanded down in these phases.
constexpr bool barrier_engaged(JunctionState s) {
  return s == JunctionState::Closing || s == JunctionState::Closed ||
         s == JunctionState::TrainPassing || s == JunctionState::FailSafe;
}

}  // namespace crossguard

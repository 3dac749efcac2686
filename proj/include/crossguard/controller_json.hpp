#pragma once

#include <nlohmann/json.hpp>

#include "crossguard/controller.hpp"

namespace crossguard {

using Json = nlohmann::ordered_json;

Json to_json(const TrackEstimate& estimate);
TrackEstimate estimate_from_json(const Json& j);

// {"event":"TrainConfirmed", ...payload}
Json to_json(const EventBody& body);
EventBody event_from_json(const Json& j);

// {"cmd":"SoundAlarm","level":"Siren"}
Json to_json(const Command& command);
Command command_from_json(const Json& j);

Json to_json(const Incident& incident);

// Snapshot for logs and bindings; not meant to be parsed back.
Json to_json(const ControllerState& state);

}  // namespace crossguard

#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "crossguard/event_log.hpp"
#include "crossguard/report.hpp"
#include "crossguard/scenario.hpp"

namespace crossguard {

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  // Pace the virtual clock against the wall clock. Logs are unaffected.
  bool realtime = false;
  double realtime_speed = 1.0;
  // Called for every sampled frame, after it is logged.
  std::function<void(const FrameObservation&)> on_frame;
};

struct RunResult {
  RunReport report;
  EventLog log;
};

// Runs the scenario on a virtual clock. The log depends only on the scenario
// and the seed.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace crossguard

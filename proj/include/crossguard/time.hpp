#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>

namespace crossguard {

// Simulation and protocol time: integer milliseconds since scenario start.
using Millis = std::chrono::duration<std::int64_t, std::milli>;

constexpr double to_seconds(Millis t) { return static_cast<double>(t.count()) / 1000.0; }

// Rounds to the nearest millisecond.
inline Millis from_seconds(double seconds) {
  return Millis{static_cast<std::int64_t>(std::llround(seconds * 1000.0))};
}

}  // namespace crossguard

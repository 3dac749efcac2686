#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>

#include "crossguard/detector.hpp"
#include "crossguard/time.hpp"

namespace crossguard {

enum class PresenceStatus { Absent, Confirmed };

std::string_view to_string(PresenceStatus s);

// k-of-n presence confirmation with an m-frame absence hysteresis.
struct WindowConfig {
  int window_len = 10;     // n
  int required_hits = 1;   // k
  int absence_len = 25;    // m consecutive misses to confirm departure
  // Expected cadence; timestamp gaps longer than this count as missed frames.
  // Zero disables gap filling.
  Millis frame_period{200};

  void validate() const;
};

struct ConfirmationUpdate;

class ConfirmationState {
 public:
  PresenceStatus status() const { return status_; }
  int consecutive_negative() const { return consecutive_negative_; }
  int hits_in_window() const { return hits_; }
  std::size_t buffered() const { return window_.size(); }
  std::optional<Millis> last_timestamp() const { return last_timestamp_; }
  // Oldest first.
  const std::deque<bool>& window() const { return window_; }

  bool operator==(const ConfirmationState&) const = default;

 private:
  friend ConfirmationUpdate update(ConfirmationState, const FrameObservation&,
                                   const WindowConfig&);
  void push(bool flag, const WindowConfig& cfg);

  std::deque<bool> window_;
  int hits_ = 0;
  int consecutive_negative_ = 0;
  PresenceStatus status_ = PresenceStatus::Absent;
  std::optional<Millis> last_timestamp_;
};

struct ConfirmationUpdate {
  ConfirmationState state;
  PresenceStatus status;
  bool changed = false;
};

// Pure step. Throws OrderingError if `obs` is not newer than the last
// observation folded into `state`.
ConfirmationUpdate update(ConfirmationState state, const FrameObservation& obs,
                          const WindowConfig& cfg);

// P(at least k successes in n independent Bernoulli(p) trials).
double window_detection_probability(double p, int n, int k);

// P(fewer than k successes); the complement, computed directly so that tiny
// miss probabilities keep full relative precision.
double window_miss_probability(double p, int n, int k);

}  // namespace crossguard

#include "crossguard/confirmation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crossguard/errors.hpp"

namespace crossguard {
namespace {

void check_binomial_args(double p, int n, int k) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("probability must lie in [0, 1]");
  if (n < 1) throw ArgumentError("window length must be at least 1");
  if (k < 1 || k > n) throw ArgumentError("required hits must lie in [1, n]");
}

// Sum of C(n,i) p^i (1-p)^(n-i) for i in [lo, hi].
double binomial_range(double p, int n, int lo, int hi) {
  const double q = 1.0 - p;
  double sum = 0.0;
  double coeff = 1.0;  // C(n, 0)
  for (int i = 0; i <= hi; ++i) {
    if (i > 0) coeff = coeff * static_cast<double>(n - i + 1) / static_cast<double>(i);
    if (i >= lo) sum += coeff * std::pow(p, i) * std::pow(q, n - i);
  }
  return sum;
}

}  // namespace

std::string_view to_string(PresenceStatus s) {
  return s == PresenceStatus::Confirmed ? "confirmed" : "absent";
}

void WindowConfig::validate() const {
  if (window_len < 1) throw ArgumentError("window_len must be at least 1");
  if (required_hits < 1 || required_hits > window_len) {
    throw ArgumentError("required_hits must lie in [1, window_len]");
  }
  if (absence_len < 1) throw ArgumentError("absence_len must be at least 1");
  if (frame_period.count() < 0) throw ArgumentError("frame_period must not be negative");
}

void ConfirmationState::push(bool flag, const WindowConfig& cfg) {
  window_.push_back(flag);
  hits_ += flag ? 1 : 0;
  while (static_cast<int>(window_.size()) > cfg.window_len) {
    hits_ -= window_.front() ? 1 : 0;
    window_.pop_front();
  }
  consecutive_negative_ = flag ? 0 : consecutive_negative_ + 1;

  if (status_ == PresenceStatus::Absent && hits_ >= cfg.required_hits) {
    status_ = PresenceStatus::Confirmed;
  } else if (status_ == PresenceStatus::Confirmed && consecutive_negative_ >= cfg.absence_len) {
    status_ = PresenceStatus::Absent;
    window_.clear();
    hits_ = 0;
  }
}

ConfirmationUpdate update(ConfirmationState state, const FrameObservation& obs,
                          const WindowConfig& cfg) {
  if (state.last_timestamp_ && obs.timestamp <= *state.last_timestamp_) {
    throw OrderingError("observation at " + std::to_string(obs.timestamp.count()) +
                        " ms is not after " + std::to_string(state.last_timestamp_->count()) +
                        " ms");
  }
  const auto before = state.status_;

  if (state.last_timestamp_ && cfg.frame_period.count() > 0) {
    const auto gap = (obs.timestamp - *state.last_timestamp_).count();
    const auto period = cfg.frame_period.count();
    const auto missed = std::max<std::int64_t>(0, (gap + period / 2) / period - 1);
    // Past n + m misses the window is all-false and only the counter moves.
    const auto simulated =
        std::min<std::int64_t>(missed, static_cast<std::int64_t>(cfg.window_len) + cfg.absence_len);
    for (std::int64_t i = 0; i < simulated; ++i) state.push(false, cfg);
    state.consecutive_negative_ += static_cast<int>(
        std::min<std::int64_t>(missed - simulated, 1'000'000'000));
  }

  state.push(obs.detected, cfg);
  state.last_timestamp_ = obs.timestamp;
  const auto status = state.status_;
  return ConfirmationUpdate{std::move(state), status, status != before};
}

double window_miss_probability(double p, int n, int k) {
  check_binomial_args(p, n, k);
  return binomial_range(p, n, 0, k - 1);
}

double window_detection_probability(double p, int n, int k) {
  check_binomial_args(p, n, k);
  if (2 * k <= n) return 1.0 - binomial_range(p, n, 0, k - 1);
  return binomial_range(p, n, k, n);
}

}  // namespace crossguard

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "crossguard/confirmation.hpp"
#include "crossguard/errors.hpp"

namespace crossguard {
namespace {

FrameObservation frame(int index, bool detected, Millis period = Millis{200}) {
  FrameObservation obs{"cam/train", period * index, detected, std::nullopt, std::nullopt};
  if (detected) {
    obs.object_class = ObjectClass::Train;
    obs.confidence = 0.9;
  }
  return obs;
}

struct Trace {
  ConfirmationState state;
  std::vector<PresenceStatus> statuses;
  std::vector<int> changes;
};

Trace feed(const std::vector<bool>& flags, const WindowConfig& cfg) {
  Trace t;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    auto r = update(t.state, frame(static_cast<int>(i), flags[i]), cfg);
    t.state = r.state;
    t.statuses.push_back(r.status);
    if (r.changed) t.changes.push_back(static_cast<int>(i));
  }
  return t;
}

TEST(Update, SingleHitConfirmsWithDefaults) {
  const auto t = feed({false, false, true}, WindowConfig{});
  EXPECT_EQ(t.statuses.back(), PresenceStatus::Confirmed);
  EXPECT_EQ(t.changes, std::vector<int>{2});
}

TEST(Update, KOfNRequiresKHitsInsideTheWindow) {
  WindowConfig cfg;
  cfg.window_len = 4;
  cfg.required_hits = 2;
  // Hits at 0 and 4 are never both inside a 4-frame window.
  auto t = feed({true, false, false, false, true}, cfg);
  EXPECT_EQ(t.statuses.back(), PresenceStatus::Absent);
  t = feed({true, false, false, true}, cfg);
  EXPECT_EQ(t.statuses.back(), PresenceStatus::Confirmed);
}

TEST(Update, AbsenceNeedsMConsecutiveMisses) {
  WindowConfig cfg;
  cfg.absence_len = 5;
  std::vector<bool> flags{true};
  for (int i = 0; i < 4; ++i) flags.push_back(false);
  flags.push_back(true);  // resets the run
  for (int i = 0; i < 4; ++i) flags.push_back(false);
  auto t = feed(flags, cfg);
  EXPECT_EQ(t.statuses.back(), PresenceStatus::Confirmed);
  flags.push_back(false);
  t = feed(flags, cfg);
  EXPECT_EQ(t.statuses.back(), PresenceStatus::Absent);
  EXPECT_EQ(t.changes, (std::vector<int>{0, 10}));
}

TEST(Update, AbsenceClearsTheWindow) {
  WindowConfig cfg;
  cfg.window_len = 10;
  cfg.required_hits = 2;
  cfg.absence_len = 3;
  // Two hits confirm, three misses release; the old hits must not linger.
  const auto t = feed({true, true, false, false, false, true}, cfg);
  EXPECT_EQ(t.statuses.back(), PresenceStatus::Absent);
  EXPECT_EQ(t.state.hits_in_window(), 1);
}

TEST(Update, StaleTimestampThrows) {
  ConfirmationState s;
  s = update(s, frame(5, true), WindowConfig{}).state;
  EXPECT_THROW(update(s, frame(5, false), WindowConfig{}), OrderingError);
  EXPECT_THROW(update(s, frame(3, false), WindowConfig{}), OrderingError);
}

TEST(Update, GapsCountAsMissedFrames) {
  WindowConfig cfg;
  cfg.absence_len = 5;
  ConfirmationState s;
  s = update(s, frame(0, true), cfg).state;
  ASSERT_EQ(s.status(), PresenceStatus::Confirmed);
  // Next frame arrives 6 periods later: 5 missing frames, then a miss.
  auto r = update(s, frame(6, false), cfg);
  EXPECT_EQ(r.status, PresenceStatus::Absent);
  EXPECT_TRUE(r.changed);
}

TEST(Update, GapFillingCanBeDisabled) {
  WindowConfig cfg;
  cfg.absence_len = 5;
  cfg.frame_period = Millis{0};
  ConfirmationState s;
  s = update(s, frame(0, true), cfg).state;
  auto r = update(s, frame(60, false), cfg);
  EXPECT_EQ(r.status, PresenceStatus::Confirmed);
  EXPECT_EQ(r.state.consecutive_negative(), 1);
}

TEST(Update, ReplayIsDeterministic) {
  Rng rng(8);
  std::vector<bool> flags;
  for (int i = 0; i < 500; ++i) flags.push_back(rng.next_unit() < 0.3);
  WindowConfig cfg;
  cfg.required_hits = 3;
  cfg.absence_len = 7;
  const auto a = feed(flags, cfg);
  const auto b = feed(flags, cfg);
  EXPECT_EQ(a.statuses, b.statuses);
  EXPECT_EQ(a.state, b.state);
}

TEST(Config, Validation) {
  WindowConfig cfg;
  cfg.required_hits = 11;
  EXPECT_THROW(cfg.validate(), ArgumentError);
  cfg = WindowConfig{};
  cfg.window_len = 0;
  EXPECT_THROW(cfg.validate(), ArgumentError);
  cfg = WindowConfig{};
  cfg.absence_len = 0;
  EXPECT_THROW(cfg.validate(), ArgumentError);
}

TEST(ClosedForm, MatchesEnumerationOracle) {
  for (double p : {0.0, 0.25, 0.5, 0.843, 1.0}) {
    for (int n = 1; n <= 12; ++n) {
      for (int k = 1; k <= n; ++k) {
        EXPECT_NEAR(window_detection_probability(p, n, k), oracle::enumerate_window_probability(p, n, k),
                    1e-12)
            << "p=" << p << " n=" << n << " k=" << k;
      }
    }
  }
}

TEST(ClosedForm, AnyHitReading) {
  EXPECT_NEAR(window_detection_probability(0.956, 10, 1), 1.0 - std::pow(0.044, 10), 1e-15);
  EXPECT_NEAR(window_miss_probability(0.778, 10, 1), std::pow(0.222, 10), 1e-20);
  EXPECT_GE(window_detection_probability(0.778, 10, 1), 0.999);
}

TEST(ClosedForm, MissProbabilityKeepsRelativePrecision) {
  const double exact = std::pow(0.044, 10);
  EXPECT_NEAR(window_miss_probability(0.956, 10, 1) / exact, 1.0, 1e-12);
}

TEST(ClosedForm, ArgumentChecks) {
  EXPECT_THROW(window_detection_probability(1.2, 10, 1), ArgumentError);
  EXPECT_THROW(window_detection_probability(0.5, 0, 1), ArgumentError);
  EXPECT_THROW(window_detection_probability(0.5, 5, 6), ArgumentError);
}

TEST(ClosedForm, Monotonicity) {
  Rng rng(77);
  for (int i = 0; i < 3000; ++i) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 30);
    const int k = 1 + static_cast<int>(rng.next_u64() % n);
    const double p = rng.next_unit();
    const double q = std::min(1.0, p + rng.next_unit() * 0.1);
    const double base = window_detection_probability(p, n, k);
    EXPECT_LE(base, window_detection_probability(q, n, k) + 1e-12);
    EXPECT_LE(base, window_detection_probability(p, n + 1, k) + 1e-12);
    if (k < n) {
      EXPECT_GE(base + 1e-12, window_detection_probability(p, n, k + 1));
    }
  }
}

}  // namespace
}  // namespace crossguard

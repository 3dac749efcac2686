#include <gtest/gtest.h>

#include "safety_explorer.hpp"

namespace crossguard {
namespace {

std::string describe(const explore::Result& r) {
  std::string s;
  for (const auto& v : r.violations) {
    s += v.property + ":";
    for (const auto& step : v.trace) s += " " + step;
    s += "\n";
  }
  return s;
}

TEST(SafetyExplorer, NoReachableViolation) {
  const auto r = explore::explore(explore::Options{});
  EXPECT_TRUE(r.violations.empty()) << describe(r);
  EXPECT_GT(r.states, 1000U);
  EXPECT_GT(r.arrivals_checked, 0U);
  EXPECT_GT(r.power_losses_checked, 0U);
}

TEST(SafetyExplorer, HoldsForOtherTimings) {
  explore::Options o;
  o.depth = 7;
  o.leads = {std::chrono::seconds{20}, std::chrono::seconds{90}};
  o.cfg.barrier_close_duration = std::chrono::seconds{6};
  o.cfg.min_close_margin = std::chrono::seconds{10};
  const auto r = explore::explore(o);
  EXPECT_TRUE(r.violations.empty()) << describe(r);
  EXPECT_GT(r.arrivals_checked, 0U);
}

}  // namespace
}  // namespace crossguard

#include <gtest/gtest.h>

#include "crossguard/errors.hpp"
#include "crossguard/monte_carlo.hpp"
#include "oracles.hpp"

namespace crossguard {
namespace {

DetectorProfile profile(double tpr) { return DetectorProfile{Target::Train, tpr, 0.001, 5.0}; }

TEST(MonteCarlo, PerfectDetectorAlwaysConfirms) {
  const auto r = monte_carlo(profile(1.0), WindowConfig{}, 5000, 9);
  EXPECT_EQ(r.confirmed, 5000U);
  EXPECT_EQ(r.estimate, 1.0);
  EXPECT_EQ(r.closed_form, 1.0);
  EXPECT_TRUE(r.agrees());
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  const auto a = monte_carlo(profile(0.3), WindowConfig{10, 4}, 20000, 5, 1);
  const auto b = monte_carlo(profile(0.3), WindowConfig{10, 4}, 20000, 5, 7);
  EXPECT_EQ(a.confirmed, b.confirmed);
}

TEST(MonteCarlo, MatchesEnumeration) {
  const WindowConfig cfg{8, 3};
  const double p = 0.4;
  const std::uint64_t n = 40000;
  const auto r = monte_carlo(profile(p), cfg, n, 21);
  const double q = oracle::enumerate_window_probability(p, 8, 3);
  EXPECT_NEAR(r.closed_form, q, 1e-12);
  EXPECT_LE(std::abs(static_cast<double>(r.confirmed) - q * n), oracle::binomial_bound_99(q, n));
}

TEST(MonteCarlo, ZeroTrialsRejected) {
  EXPECT_THROW(monte_carlo(profile(0.5), WindowConfig{}, 0, 1), ArgumentError);
}

}  // namespace
}  // namespace crossguard

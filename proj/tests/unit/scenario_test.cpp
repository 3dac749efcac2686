#include <gtest/gtest.h>

#include <filesystem>

#include "crossguard/errors.hpp"
#include "crossguard/scenario.hpp"

namespace crossguard {
namespace {

using namespace std::chrono_literals;

Json minimal() {
  return Json::parse(R"({"trains":[{"id":"T1","entry_s":0,"velocity_mps":20}],"seed":1,"duration_s":60})");
}

std::string field_of(const Json& j) {
  try {
    scenario_from_json(j);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(Scenario, Defaults) {
  const auto s = scenario_from_json(minimal(), "m");
  EXPECT_EQ(s.id, "m");
  EXPECT_EQ(s.seed, 1U);
  EXPECT_EQ(s.duration, 60s);
  EXPECT_DOUBLE_EQ(s.geometry.detection_distance_m, 2500.0);
  EXPECT_DOUBLE_EQ(s.geometry.camera_spacing_m, 500.0);
  EXPECT_EQ(s.condition, Condition::Day);
  EXPECT_EQ(s.window.window_len, 10);
  EXPECT_EQ(s.window.required_hits, 1);
  // Up-direction cameras plus the junction camera.
  ASSERT_EQ(s.cameras.size(), 4U);
  EXPECT_EQ(s.recipients.size(), 3U);
  EXPECT_EQ(s.trains[0].direction, Direction::Up);
}

TEST(Scenario, DefaultCamerasCoverBothDirectionsWhenUsed) {
  auto j = minimal();
  j["trains"].push_back({{"id", "T2"}, {"direction", "down"}, {"entry_s", 5}, {"velocity_mps", 10}});
  EXPECT_EQ(scenario_from_json(j).cameras.size(), 7U);
}

TEST(Scenario, RejectsInvalidInput) {
  auto j = minimal();
  j.erase("seed");
  EXPECT_EQ(field_of(j), "seed");

  j = minimal();
  j["seed"] = -3;
  EXPECT_EQ(field_of(j), "seed");

  j = minimal();
  j["trains"][0]["velocity_mps"] = 0;
  EXPECT_EQ(field_of(j), "trains[0].velocity_mps");

  j = minimal();
  j["trespassers"] = Json::parse(R"([{"enter_s":10,"clear_s":5}])");
  EXPECT_EQ(field_of(j), "trespassers[0].clear_s");

  j = minimal();
  j["colour"] = "red";
  EXPECT_EQ(field_of(j), "colour");

  j = minimal();
  j["trains"][0]["speed"] = 3;
  EXPECT_EQ(field_of(j), "trains[0].speed");

  j = minimal();
  j["junction"] = {{"detection_distance_m", 1000}};
  EXPECT_EQ(field_of(j), "junction.detection_distance_m");

  j = minimal();
  j["trains"].push_back(j["trains"][0]);
  EXPECT_EQ(field_of(j), "trains[1].id");

  j = minimal();
  j["confirmation"] = {{"window", 3}, {"hits", 4}};
  EXPECT_EQ(field_of(j), "confirmation");

  j = minimal();
  j["duration_s"] = 0;
  EXPECT_EQ(field_of(j), "duration_s");
}

TEST(Scenario, JsonRoundTrip) {
  auto j = minimal();
  j["trespassers"] = Json::parse(R"([{"enter_s":10}])");
  j["outages"] = Json::parse(R"([{"start_s":20,"end_s":30}])");
  const auto s = scenario_from_json(j, "rt");
  const auto again = scenario_from_json(to_json(s), "other");
  EXPECT_EQ(to_json(again), to_json(s));
}

TEST(Scenario, MissingFile) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ValidationError);
}

TEST(Scenario, ShippedScenariosLoad) {
  for (const auto& entry : std::filesystem::directory_iterator(CROSSGUARD_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_scenario(entry.path())) << entry.path();
  }
}

}  // namespace
}  // namespace crossguard

#include "crossguard/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "crossguard/errors.hpp"

namespace crossguard {
namespace {

// Strict reader over one JSON object; every error names the full field path.
class Fields {
 public:
  Fields(const Json& j, std::string path, std::initializer_list<std::string_view> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "(root)" : path_, "must be an object");
    for (const auto& [key, _] : j_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw ValidationError(name(key), "unknown field");
      }
    }
  }

  std::string name(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  bool has(std::string_view key) const {
    return j_.contains(std::string(key)) && !j_.at(std::string(key)).is_null();
  }
  const Json& raw(std::string_view key) const { return j_.at(std::string(key)); }

  std::optional<double> number(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    const auto& v = raw(key);
    if (!v.is_number()) throw ValidationError(name(key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(name(key), "must be finite");
    return d;
  }
  double number_or(std::string_view key, double fallback) const {
    return number(key).value_or(fallback);
  }
  double required_number(std::string_view key) const {
    auto v = number(key);
    if (!v) throw ValidationError(name(key), "missing");
    return *v;
  }
  std::optional<std::string> string(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    if (!raw(key).is_string()) throw ValidationError(name(key), "must be a string");
    return raw(key).get<std::string>();
  }
  std::string required_string(std::string_view key) const {
    auto v = string(key);
    if (!v || v->empty()) throw ValidationError(name(key), "missing");
    return *v;
  }
  std::optional<bool> boolean(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    if (!raw(key).is_boolean()) throw ValidationError(name(key), "must be a boolean");
    return raw(key).get<bool>();
  }
  std::optional<int> integer(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    if (!raw(key).is_number_integer()) throw ValidationError(name(key), "must be an integer");
    return raw(key).get<int>();
  }
  const Json* array(std::string_view key) const {
    if (!has(key)) return nullptr;
    if (!raw(key).is_array()) throw ValidationError(name(key), "must be an array");
    return &raw(key);
  }

 private:
  const Json& j_;
  std::string path_;
};

std::string indexed(std::string_view base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

Millis seconds_field(const Fields& f, std::string_view key, double fallback_s) {
  return from_seconds(f.number_or(key, fallback_s));
}

template <class Parse>
auto wrap_enum(const Fields& f, std::string_view key, Parse parse) {
  try {
    return parse(*f.string(key));
  } catch (const ArgumentError& e) {
    throw ValidationError(f.name(key), e.what());
  }
}

ProfileOverride parse_override(const Json& j, const std::string& path) {
  Fields f(j, path, {"tpr", "fpr", "frame_rate"});
  return ProfileOverride{f.number("tpr"), f.number("fpr"), f.number("frame_rate")};
}

CameraRole parse_role(std::string_view text) {
  for (auto r : {CameraRole::UpstreamA, CameraRole::UpstreamB, CameraRole::Junction,
                 CameraRole::FarSide}) {
    if (to_string(r) == text) return r;
  }
  throw ArgumentError("unknown camera role '" + std::string(text) + "'");
}

void check_time(Millis t, Millis duration, const std::string& field) {
  if (t.count() < 0 || t > duration) {
    throw ValidationError(field, "time " + std::to_string(to_seconds(t)) +
                                     " s outside [0, duration]");
  }
}

Json seconds(Millis t) { return to_seconds(t); }

Json override_json(const ProfileOverride& o) {
  Json j = Json::object();
  if (o.true_positive_rate) j["tpr"] = *o.true_positive_rate;
  if (o.false_positive_rate) j["fpr"] = *o.false_positive_rate;
  if (o.frame_rate) j["frame_rate"] = *o.frame_rate;
  return j;
}

}  // namespace

std::string_view to_string(CameraRole r) {
  switch (r) {
    case CameraRole::UpstreamA: return "UpstreamA";
    case CameraRole::UpstreamB: return "UpstreamB";
    case CameraRole::Junction: return "Junction";
    case CameraRole::FarSide: return "FarSide";
  }
  return "?";
}

DetectorProfile ProfileOverride::apply(DetectorProfile base) const {
  if (true_positive_rate) base.true_positive_rate = *true_positive_rate;
  if (false_positive_rate) base.false_positive_rate = *false_positive_rate;
  if (frame_rate) base.frame_rate = *frame_rate;
  return base;
}

double Scenario::camera_position(const CameraSpec& camera) const {
  switch (camera.role) {
    case CameraRole::UpstreamA: return -geometry.detection_distance_m;
    case CameraRole::UpstreamB: return -geometry.second_point_distance();
    case CameraRole::Junction: return 0.0;
    case CameraRole::FarSide: return geometry.far_side_m;
  }
  return 0.0;
}

Scenario scenario_from_json(const Json& j, std::string default_id) {
  Fields root(j, "",
              {"id", "junction", "condition", "cameras", "trains", "trespassers", "suspicious",
               "outages", "timetable", "recipients", "controller", "confirmation", "retry", "seed",
               "duration_s"});
  Scenario s;
  s.id = root.string("id").value_or(std::move(default_id));

  if (!root.has("seed")) throw ValidationError("seed", "missing (runs must be reproducible)");
  if (!root.raw("seed").is_number_unsigned()) {
    throw ValidationError("seed", "must be a non-negative integer");
  }
  s.seed = root.raw("seed").get<std::uint64_t>();

  const double duration_s = root.required_number("duration_s");
  if (!(duration_s > 0.0)) throw ValidationError("duration_s", "must be positive");
  s.duration = from_seconds(duration_s);

  if (root.has("junction")) {
    Fields f(root.raw("junction"), "junction",
             {"id", "detection_distance_m", "camera_spacing_m", "far_side_m", "up_block",
              "down_block", "backup_power", "view_radius_m", "barrier_open_s",
              "unconfirmed_track_timeout_s", "passage_timeout_s"});
    s.junction_id = f.string("id").value_or(s.junction_id);
    s.geometry.detection_distance_m = f.number_or("detection_distance_m", 2500.0);
    s.geometry.camera_spacing_m = f.number_or("camera_spacing_m", 500.0);
    s.geometry.far_side_m = f.number_or("far_side_m", 200.0);
    s.geometry.up_block = f.string("up_block").value_or(s.geometry.up_block);
    s.geometry.down_block = f.string("down_block").value_or(s.geometry.down_block);
    s.backup_power = f.boolean("backup_power").value_or(false);
    s.view_radius_m = f.number_or("view_radius_m", s.view_radius_m);
    s.barrier_open_duration = seconds_field(f, "barrier_open_s", 10.0);
    s.unconfirmed_track_timeout = seconds_field(f, "unconfirmed_track_timeout_s", 120.0);
    s.passage_timeout = seconds_field(f, "passage_timeout_s", 120.0);
  }

  if (root.has("condition")) s.condition = wrap_enum(root, "condition", parse_condition);

  if (const auto* cams = root.array("cameras")) {
    for (std::size_t i = 0; i < cams->size(); ++i) {
      const auto path = indexed("cameras", i);
      Fields f((*cams)[i], path, {"id", "role", "direction", "train", "trespasser"});
      CameraSpec c;
      c.id = f.required_string("id");
      if (!f.has("role")) throw ValidationError(f.name("role"), "missing");
      c.role = wrap_enum(f, "role", parse_role);
      if (f.has("direction")) c.direction = wrap_enum(f, "direction", parse_direction);
      if (f.has("train")) c.train = parse_override(f.raw("train"), f.name("train"));
      if (f.has("trespasser")) {
        if (c.role != CameraRole::Junction) {
          throw ValidationError(f.name("trespasser"), "only the junction camera watches for trespassers");
        }
        c.trespasser = parse_override(f.raw("trespasser"), f.name("trespasser"));
      }
      s.cameras.push_back(std::move(c));
    }
  }

  if (const auto* trains = root.array("trains")) {
    for (std::size_t i = 0; i < trains->size(); ++i) {
      Fields f((*trains)[i], indexed("trains", i),
               {"id", "direction", "entry_s", "velocity_mps", "length_m"});
      TrainMovement t;
      t.id = f.required_string("id");
      if (f.has("direction")) t.direction = wrap_enum(f, "direction", parse_direction);
      t.entry = from_seconds(f.required_number("entry_s"));
      t.velocity_mps = f.required_number("velocity_mps");
      t.length_m = f.number_or("length_m", t.length_m);
      s.trains.push_back(std::move(t));
    }
  }

  if (const auto* tres = root.array("trespassers")) {
    for (std::size_t i = 0; i < tres->size(); ++i) {
      Fields f((*tres)[i], indexed("trespassers", i), {"enter_s", "clear_s"});
      TrespasserInterval t;
      t.enter = from_seconds(f.required_number("enter_s"));
      if (auto clear = f.number("clear_s")) t.clear = from_seconds(*clear);
      s.trespassers.push_back(t);
    }
  }

  if (const auto* sus = root.array("suspicious")) {
    for (std::size_t i = 0; i < sus->size(); ++i) {
      Fields f((*sus)[i], indexed("suspicious", i), {"t_s"});
      s.suspicious_activity.push_back(from_seconds(f.required_number("t_s")));
    }
  }

  if (const auto* outages = root.array("outages")) {
    for (std::size_t i = 0; i < outages->size(); ++i) {
      Fields f((*outages)[i], indexed("outages", i), {"start_s", "end_s"});
      OutageInterval o;
      o.start = from_seconds(f.required_number("start_s"));
      if (auto end = f.number("end_s")) o.end = from_seconds(*end);
      s.outages.push_back(o);
    }
  }

  if (const auto* tt = root.array("timetable")) {
    for (std::size_t i = 0; i < tt->size(); ++i) {
      Fields f((*tt)[i], indexed("timetable", i), {"train_id", "arrival_s", "departure_s"});
      TimetableEntry e;
      e.train_id = f.required_string("train_id");
      e.scheduled_arrival = from_seconds(f.required_number("arrival_s"));
      e.scheduled_departure = from_seconds(f.required_number("departure_s"));
      s.timetable.push_back(std::move(e));
    }
  }

  if (const auto* recipients = root.array("recipients")) {
    for (std::size_t i = 0; i < recipients->size(); ++i) {
      Fields f((*recipients)[i], indexed("recipients", i),
               {"id", "kind", "endpoint", "fail_first", "fail_always"});
      RecipientSpec r;
      r.recipient.id = f.required_string("id");
      if (!f.has("kind")) throw ValidationError(f.name("kind"), "missing");
      r.recipient.kind = wrap_enum(f, "kind", parse_recipient_kind);
      r.recipient.endpoint = f.required_string("endpoint");
      r.fail_first = f.integer("fail_first").value_or(0);
      r.fail_always = f.boolean("fail_always").value_or(false);
      if (r.fail_first < 0) throw ValidationError(f.name("fail_first"), "must not be negative");
      s.recipients.push_back(std::move(r));
    }
  }

  if (root.has("controller")) {
    Fields f(root.raw("controller"), "controller",
             {"barrier_close_s", "t_siren_s", "t_distress_s", "t_train_signal_s", "eta_critical_s",
              "watchdog_timeout_s", "min_close_margin_s"});
    auto& c = s.controller;
    c.barrier_close_duration = seconds_field(f, "barrier_close_s", to_seconds(c.barrier_close_duration));
    c.t_siren = seconds_field(f, "t_siren_s", to_seconds(c.t_siren));
    c.t_distress = seconds_field(f, "t_distress_s", to_seconds(c.t_distress));
    c.t_train_signal = seconds_field(f, "t_train_signal_s", to_seconds(c.t_train_signal));
    c.eta_critical = seconds_field(f, "eta_critical_s", to_seconds(c.eta_critical));
    c.watchdog_timeout = seconds_field(f, "watchdog_timeout_s", to_seconds(c.watchdog_timeout));
    c.min_close_margin = seconds_field(f, "min_close_margin_s", to_seconds(c.min_close_margin));
  }

  if (root.has("confirmation")) {
    Fields f(root.raw("confirmation"), "confirmation", {"window", "hits", "absence"});
    s.window.window_len = f.integer("window").value_or(s.window.window_len);
    s.window.required_hits = f.integer("hits").value_or(s.window.required_hits);
    s.window.absence_len = f.integer("absence").value_or(s.window.absence_len);
  }

  if (root.has("retry")) {
    Fields f(root.raw("retry"), "retry", {"max_retries", "initial_backoff_s", "multiplier"});
    s.retry.max_retries = f.integer("max_retries").value_or(s.retry.max_retries);
    s.retry.initial_backoff = seconds_field(f, "initial_backoff_s", to_seconds(s.retry.initial_backoff));
    s.retry.multiplier = f.integer("multiplier").value_or(s.retry.multiplier);
  }

  finalize_scenario(s);
  return s;
}

void finalize_scenario(Scenario& s) {
  if (s.duration.count() <= 0) throw ValidationError("duration_s", "must be positive");

  try {
    s.geometry.validate();
  } catch (const ArgumentError& e) {
    throw ValidationError("junction", e.what());
  }
  if (s.geometry.detection_distance_m < 2000.0 || s.geometry.detection_distance_m > 3000.0) {
    throw ValidationError("junction.detection_distance_m", "must lie between 2000 and 3000 m");
  }
  if (!(s.view_radius_m > 0.0)) throw ValidationError("junction.view_radius_m", "must be positive");
  if (s.barrier_open_duration.count() <= 0) {
    throw ValidationError("junction.barrier_open_s", "must be positive");
  }
  if (s.unconfirmed_track_timeout.count() <= 0 || s.passage_timeout.count() <= 0) {
    throw ValidationError("junction", "track timeouts must be positive");
  }
  try {
    s.controller.validate();
  } catch (const ArgumentError& e) {
    throw ValidationError("controller", e.what());
  }
  try {
    s.window.validate();
  } catch (const ArgumentError& e) {
    throw ValidationError("confirmation", e.what());
  }
  try {
    s.retry.validate();
  } catch (const ArgumentError& e) {
    throw ValidationError("retry", e.what());
  }

  std::set<std::string> train_ids;
  for (std::size_t i = 0; i < s.trains.size(); ++i) {
    const auto& t = s.trains[i];
    const auto path = indexed("trains", i);
    if (t.id.empty()) throw ValidationError(path + ".id", "missing");
    if (!train_ids.insert(t.id).second) throw ValidationError(path + ".id", "duplicate train id");
    check_time(t.entry, s.duration, path + ".entry_s");
    if (!(t.velocity_mps > 0.0)) throw ValidationError(path + ".velocity_mps", "must be positive");
    if (!(t.length_m > 0.0)) throw ValidationError(path + ".length_m", "must be positive");
  }
  for (std::size_t i = 0; i < s.trespassers.size(); ++i) {
    const auto& t = s.trespassers[i];
    const auto path = indexed("trespassers", i);
    check_time(t.enter, s.duration, path + ".enter_s");
    if (t.clear) {
      check_time(*t.clear, s.duration, path + ".clear_s");
      if (*t.clear < t.enter) throw ValidationError(path + ".clear_s", "before enter_s");
    }
  }
  for (std::size_t i = 0; i < s.suspicious_activity.size(); ++i) {
    check_time(s.suspicious_activity[i], s.duration, indexed("suspicious", i) + ".t_s");
  }
  for (std::size_t i = 0; i < s.outages.size(); ++i) {
    const auto& o = s.outages[i];
    const auto path = indexed("outages", i);
    check_time(o.start, s.duration, path + ".start_s");
    if (o.end) {
      check_time(*o.end, s.duration, path + ".end_s");
      if (*o.end < o.start) throw ValidationError(path + ".end_s", "before start_s");
    }
  }
  for (std::size_t i = 0; i < s.timetable.size(); ++i) {
    const auto& e = s.timetable[i];
    const auto path = indexed("timetable", i);
    check_time(e.scheduled_arrival, s.duration, path + ".arrival_s");
    check_time(e.scheduled_departure, s.duration, path + ".departure_s");
    if (e.scheduled_departure < e.scheduled_arrival) {
      throw ValidationError(path + ".departure_s", "before arrival_s");
    }
  }

  if (s.cameras.empty()) {
    std::set<Direction> directions;
    for (const auto& t : s.trains) directions.insert(t.direction);
    if (directions.empty()) directions.insert(Direction::Up);
    for (auto d : directions) {
      const std::string prefix = d == Direction::Up ? "up" : "down";
      s.cameras.push_back(CameraSpec{prefix + "-a", CameraRole::UpstreamA, d, {}, {}});
      s.cameras.push_back(CameraSpec{prefix + "-b", CameraRole::UpstreamB, d, {}, {}});
      s.cameras.push_back(CameraSpec{prefix + "-far", CameraRole::FarSide, d, {}, {}});
    }
    s.cameras.push_back(CameraSpec{"junction", CameraRole::Junction, Direction::Up, {}, {}});
  }
  std::set<std::string> camera_ids;
  int junction_cameras = 0;
  for (std::size_t i = 0; i < s.cameras.size(); ++i) {
    const auto& c = s.cameras[i];
    const auto path = indexed("cameras", i);
    if (!camera_ids.insert(c.id).second) throw ValidationError(path + ".id", "duplicate camera id");
    if (c.id.find('/') != std::string::npos) throw ValidationError(path + ".id", "must not contain '/'");
    junction_cameras += c.role == CameraRole::Junction ? 1 : 0;
    try {
      c.train.apply(DetectorProfile{}).validate();
      c.trespasser.apply(DetectorProfile{}).validate();
    } catch (const ArgumentError& e) {
      throw ValidationError(path, e.what());
    }
  }
  if (junction_cameras > 1) throw ValidationError("cameras", "at most one junction camera");

  if (s.recipients.empty()) {
    s.recipients = {
        {{"fire-1", RecipientKind::FireBrigade, "loopback://fire-1"}, 0, false},
        {{"police-1", RecipientKind::Police, "loopback://police-1"}, 0, false},
        {{"train-ops", RecipientKind::TrainOperator, "loopback://train-ops"}, 0, false},
    };
  }
  std::set<std::string> recipient_ids;
  for (std::size_t i = 0; i < s.recipients.size(); ++i) {
    if (!recipient_ids.insert(s.recipients[i].recipient.id).second) {
      throw ValidationError(indexed("recipients", i) + ".id", "duplicate recipient id");
    }
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("path", "cannot open scenario file '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("", std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j, path.stem().string());
}

Json to_json(const Scenario& s) {
  Json j;
  j["id"] = s.id;
  j["junction"] = {{"id", s.junction_id},
                   {"detection_distance_m", s.geometry.detection_distance_m},
                   {"camera_spacing_m", s.geometry.camera_spacing_m},
                   {"far_side_m", s.geometry.far_side_m},
                   {"up_block", s.geometry.up_block},
                   {"down_block", s.geometry.down_block},
                   {"backup_power", s.backup_power},
                   {"view_radius_m", s.view_radius_m},
                   {"barrier_open_s", seconds(s.barrier_open_duration)},
                   {"unconfirmed_track_timeout_s", seconds(s.unconfirmed_track_timeout)},
                   {"passage_timeout_s", seconds(s.passage_timeout)}};
  j["condition"] = std::string(to_string(s.condition));
  j["cameras"] = Json::array();
  for (const auto& c : s.cameras) {
    Json cj{{"id", c.id}, {"role", std::string(to_string(c.role))}};
    if (c.role != CameraRole::Junction) cj["direction"] = std::string(to_string(c.direction));
    if (auto o = override_json(c.train); !o.empty()) cj["train"] = o;
    if (auto o = override_json(c.trespasser); !o.empty()) cj["trespasser"] = o;
    j["cameras"].push_back(std::move(cj));
  }
  j["trains"] = Json::array();
  for (const auto& t : s.trains) {
    j["trains"].push_back({{"id", t.id},
                           {"direction", std::string(to_string(t.direction))},
                           {"entry_s", seconds(t.entry)},
                           {"velocity_mps", t.velocity_mps},
                           {"length_m", t.length_m}});
  }
  j["trespassers"] = Json::array();
  for (const auto& t : s.trespassers) {
    j["trespassers"].push_back(
        {{"enter_s", seconds(t.enter)}, {"clear_s", t.clear ? seconds(*t.clear) : Json(nullptr)}});
  }
  j["suspicious"] = Json::array();
  for (auto t : s.suspicious_activity) j["suspicious"].push_back({{"t_s", seconds(t)}});
  j["outages"] = Json::array();
  for (const auto& o : s.outages) {
    j["outages"].push_back(
        {{"start_s", seconds(o.start)}, {"end_s", o.end ? seconds(*o.end) : Json(nullptr)}});
  }
  j["timetable"] = Json::array();
  for (const auto& e : s.timetable) {
    j["timetable"].push_back({{"train_id", e.train_id},
                              {"arrival_s", seconds(e.scheduled_arrival)},
                              {"departure_s", seconds(e.scheduled_departure)}});
  }
  j["recipients"] = Json::array();
  for (const auto& r : s.recipients) {
    j["recipients"].push_back({{"id", r.recipient.id},
                               {"kind", std::string(to_string(r.recipient.kind))},
                               {"endpoint", r.recipient.endpoint},
                               {"fail_first", r.fail_first},
                               {"fail_always", r.fail_always}});
  }
  const auto& c = s.controller;
  j["controller"] = {{"barrier_close_s", seconds(c.barrier_close_duration)},
                     {"t_siren_s", seconds(c.t_siren)},
                     {"t_distress_s", seconds(c.t_distress)},
                     {"t_train_signal_s", seconds(c.t_train_signal)},
                     {"eta_critical_s", seconds(c.eta_critical)},
                     {"watchdog_timeout_s", seconds(c.watchdog_timeout)},
                     {"min_close_margin_s", seconds(c.min_close_margin)}};
  j["confirmation"] = {{"window", s.window.window_len},
                       {"hits", s.window.required_hits},
                       {"absence", s.window.absence_len}};
  j["retry"] = {{"max_retries", s.retry.max_retries},
                {"initial_backoff_s", seconds(s.retry.initial_backoff)},
                {"multiplier", s.retry.multiplier}};
  j["seed"] = s.seed;
  j["duration_s"] = seconds(s.duration);
  return j;
}

}  // namespace crossguard

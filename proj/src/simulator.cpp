#include "crossguard/simulator.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <thread>
#include <tuple>

#include <spdlog/spdlog.h>

#include "crossguard/errors.hpp"
#include "crossguard/observation_codec.hpp"
#include "crossguard/reference_data.hpp"

namespace crossguard {
namespace {

enum Priority : int {
  kWorld = 0,
  kDetector = 1,
  kConfirmation = 2,
  kController = 3,
  kNotify = 4,
  kEnd = 5,
};

enum class ItemKind {
  Frame,
  Confirm,
  Controller,
  NotifyFlush,
  BarrierSettled,
  TrainArrival,
  TrainCleared,
  OutageStart,
  OutageEnd,
  TrespasserEnter,
  TrespasserClear,
  Suspicious,
  Tick,
  BlockRelease,
  End,
};

struct Item {
  Millis t{0};
  int priority = 0;
  std::uint64_t seq = 0;
  ItemKind kind = ItemKind::End;
  std::size_t index = 0;
  std::uint64_t generation = 0;
  std::optional<FrameObservation> obs;
  std::optional<EventBody> event;
  std::string train_id;
};

struct Later {
  bool operator()(const Item& a, const Item& b) const {
    return std::tie(a.t, a.priority, a.seq) > std::tie(b.t, b.priority, b.seq);
  }
};

struct Channel {
  std::string id;
  CameraRole role = CameraRole::UpstreamA;
  Direction direction = Direction::Up;
  Target target = Target::Train;
  DetectorProfile profile;
  double position = 0.0;
  WindowConfig window;
  Rng rng{0};
  ConfirmationState confirmation;
  std::optional<std::string> track;  // train the current confirmation belongs to
  int fresh_negatives = 0;           // consecutive misses since the last fault
};

enum class Stage { Approaching, AtJunction, Departing };

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Approaching: return "approaching";
    case Stage::AtJunction: return "at_junction";
    case Stage::Departing: return "departing";
  }
  return "?";
}

struct Track {
  std::string id;
  Direction direction = Direction::Up;
  bool phantom = false;
  Stage stage = Stage::Approaching;
  Millis stage_since{0};
  std::optional<Millis> first_point_at;
  std::optional<Millis> second_point_at;
  std::optional<double> velocity_mps;
  TrackEstimate estimate;
};

enum class Barrier { Up, Lowering, Down, Raising };

std::string_view to_string(Barrier b) {
  switch (b) {
    case Barrier::Up: return "up";
    case Barrier::Lowering: return "lowering";
    case Barrier::Down: return "down";
    case Barrier::Raising: return "raising";
  }
  return "?";
}

// Loopback for "loopback://" endpoints, TCP for "tcp://".
class RoutingTransport final : public Transport {
 public:
  explicit RoutingTransport(const std::vector<RecipientSpec>& specs) {
    for (const auto& s : specs) {
      if (s.fail_always) loopback_.fail_always(s.recipient.id);
      if (s.fail_first > 0) loopback_.fail_next(s.recipient.id, s.fail_first);
    }
  }

  bool deliver(const Recipient& recipient, const DistressMessage& msg, Millis at) override {
    if (recipient.endpoint.rfind("tcp://", 0) == 0) return tcp_.deliver(recipient, msg, at);
    return loopback_.deliver(recipient, msg, at);
  }

 private:
  LoopbackTransport loopback_;
  TcpTransport tcp_;
};

bool same_apart_from_clock(ControllerState a, ControllerState b) {
  a.last_event_at.reset();
  b.last_event_at.reset();
  return a == b;
}

class Simulation {
 public:
  Simulation(const Scenario& scenario, const RunOptions& options)
      : sc_(scenario),
        options_(options),
        seed_(options.seed_override.value_or(scenario.seed)),
        transport_(scenario.recipients) {}

  EventLog run() {
    Scenario resolved = sc_;
    resolved.seed = seed_;
    log(Millis{0}, "sim",
        {{"type", "run_start"},
         {"seed", seed_},
         {"reference_data_version", reference::kReferenceDataVersion},
         {"scenario", to_json(resolved)}});

    build_channels();
    schedule_world();

    const auto wall_start = std::chrono::steady_clock::now();
    while (!queue_.empty()) {
      Item item = queue_.top();
      queue_.pop();
      if (options_.realtime) {
        const auto offset = std::chrono::duration<double>(to_seconds(item.t) / options_.realtime_speed);
        std::this_thread::sleep_until(
            wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(offset));
      }
      now_ = item.t;
      if (item.kind == ItemKind::End) {
        finish();
        break;
      }
      dispatch(item);
    }
    return std::move(log_);
  }

 private:
  // --- plumbing -----------------------------------------------------------

  void log(Millis t, const char* source, Json payload) { log_.append(t, source, std::move(payload)); }

  void push(Item item) {
    item.seq = next_seq_++;
    queue_.push(std::move(item));
  }

  void push_at(Millis t, int priority, ItemKind kind, std::size_t index = 0) {
    Item item;
    item.t = t;
    item.priority = priority;
    item.kind = kind;
    item.index = index;
    push(std::move(item));
  }

  void send(EventBody body) {
    Item item;
    item.t = now_;
    item.priority = kController;
    item.kind = ItemKind::Controller;
    item.event = std::move(body);
    push(std::move(item));
  }

  bool within_run(Millis t) const { return t <= sc_.duration; }

  // --- setup --------------------------------------------------------------

  void build_channels() {
    for (const auto& cam : sc_.cameras) {
      auto add = [&](Target target, const ProfileOverride& over) {
        Channel ch;
        ch.window = sc_.window;
        ch.id = cam.id + "/" + std::string(to_string(target));
        ch.role = cam.role;
        ch.direction = cam.direction;
        ch.target = target;
        ch.profile = over.apply(profile_for(sc_.condition, target));
        ch.window.frame_period = ch.profile.frame_period();
        ch.position = sc_.camera_position(cam);
        channels_.push_back(std::move(ch));
      };
      add(Target::Train, cam.train);
      if (cam.role == CameraRole::Junction) add(Target::Trespasser, cam.trespasser);
    }
    std::sort(channels_.begin(), channels_.end(),
              [](const Channel& a, const Channel& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      channels_[i].rng = Rng(split_seed(seed_, i));
      push_at(Millis{0}, kDetector, ItemKind::Frame, i);
    }
  }

  void schedule_world() {
    const double d = sc_.geometry.detection_distance_m;
    for (std::size_t i = 0; i < sc_.trains.size(); ++i) {
      const auto& tr = sc_.trains[i];
      const Millis arrival = tr.entry + from_seconds(d / tr.velocity_mps);
      const Millis cleared = tr.entry + from_seconds((d + tr.length_m) / tr.velocity_mps);
      if (within_run(arrival)) push_at(arrival, kWorld, ItemKind::TrainArrival, i);
      if (within_run(cleared)) push_at(cleared, kWorld, ItemKind::TrainCleared, i);
    }
    for (std::size_t i = 0; i < sc_.trespassers.size(); ++i) {
      push_at(sc_.trespassers[i].enter, kWorld, ItemKind::TrespasserEnter, i);
      if (sc_.trespassers[i].clear) {
        push_at(*sc_.trespassers[i].clear, kWorld, ItemKind::TrespasserClear, i);
      }
    }
    for (std::size_t i = 0; i < sc_.outages.size(); ++i) {
      push_at(sc_.outages[i].start, kWorld, ItemKind::OutageStart, i);
      if (sc_.outages[i].end) push_at(*sc_.outages[i].end, kWorld, ItemKind::OutageEnd, i);
    }
    for (std::size_t i = 0; i < sc_.suspicious_activity.size(); ++i) {
      push_at(sc_.suspicious_activity[i], kWorld, ItemKind::Suspicious, i);
    }
    for (Millis t{1000}; t <= sc_.duration; t += Millis{1000}) push_at(t, kController, ItemKind::Tick);
    push_at(sc_.duration, kEnd, ItemKind::End);
  }

  // --- ground truth -------------------------------------------------------

  double head_position(const TrainMovement& tr, Millis t) const {
    return -sc_.geometry.detection_distance_m + tr.velocity_mps * to_seconds(t - tr.entry);
  }

  // Upstream cameras look down the line from their post; the others are
  // centred on their position.
  std::pair<double, double> field_of_view(const Channel& ch) const {
    const double r = sc_.view_radius_m;
    if (ch.role == CameraRole::UpstreamA || ch.role == CameraRole::UpstreamB) {
      return {ch.position, ch.position + 2.0 * r};
    }
    return {ch.position - r, ch.position + r};
  }

  // Nearest train whose body overlaps the channel's field of view.
  std::optional<std::size_t> train_in_view(const Channel& ch, Millis t) const {
    std::optional<std::size_t> best;
    double best_distance = 0.0;
    for (std::size_t i = 0; i < sc_.trains.size(); ++i) {
      const auto& tr = sc_.trains[i];
      if (ch.role != CameraRole::Junction && tr.direction != ch.direction) continue;
      const double head = head_position(tr, t);
      const auto [near, far] = field_of_view(ch);
      if (head < near || head - tr.length_m > far) continue;
      const double distance = std::abs(head - ch.position);
      if (!best || distance < best_distance) {
        best = i;
        best_distance = distance;
      }
    }
    return best;
  }

  bool trespasser_present(Millis t) const {
    return std::any_of(sc_.trespassers.begin(), sc_.trespassers.end(), [&](const TrespasserInterval& iv) {
      return iv.enter <= t && (!iv.clear || t < *iv.clear);
    });
  }

  bool truth(const Channel& ch, Millis t) const {
    return ch.target == Target::Trespasser ? trespasser_present(t) : train_in_view(ch, t).has_value();
  }

  // --- event handlers -----------------------------------------------------

  void dispatch(Item& item) {
    switch (item.kind) {
      case ItemKind::Frame: return on_frame(item.index);
      case ItemKind::Confirm: return on_confirm(item.index, *item.obs);
      case ItemKind::Controller: return deliver(*item.event);
      case ItemKind::NotifyFlush: return flush_notifications();
      case ItemKind::BarrierSettled: return on_barrier_settled(item.generation);
      case ItemKind::TrainArrival: return on_arrival(item.index);
      case ItemKind::TrainCleared:
        log(now_, "world", {{"type", "train_cleared"}, {"train_id", sc_.trains[item.index].id}});
        return;
      case ItemKind::OutageStart: return on_outage(true);
      case ItemKind::OutageEnd: return on_outage(false);
      case ItemKind::TrespasserEnter:
        log(now_, "world", {{"type", "trespasser"}, {"state", "enter"}});
        return;
      case ItemKind::TrespasserClear:
        log(now_, "world", {{"type", "trespasser"}, {"state", "clear"}});
        return;
      case ItemKind::Suspicious:
        log(now_, "activity", {{"type", "suspicious_activity"}});
        send(ev::SuspiciousActivity{});
        return;
      case ItemKind::Tick: return on_tick();
      case ItemKind::BlockRelease: return on_block_release(item.train_id);
      case ItemKind::End: return;
    }
  }

  void on_frame(std::size_t index) {
    auto& ch = channels_[index];
    const Millis next = now_ + ch.profile.frame_period();
    if (within_run(next)) push_at(next, kDetector, ItemKind::Frame, index);
    if (outage_depth_ > 0 && !sc_.backup_power) return;

    const bool present = truth(ch, now_);
    auto obs = sample_frame(present, ch.profile, ch.rng, ch.id, now_);
    log(now_, "detector",
        {{"type", "observation"}, {"truth", present}, {"obs", Json::parse(serialize_observation(obs))}});
    if (options_.on_frame) options_.on_frame(obs);

    last_observation_ = now_;
    if (watchdog_fired_) {
      watchdog_fired_ = false;
      send(ev::ObservationsResumed{});
    }
    if (ch.target == Target::Train) ch.fresh_negatives = obs.detected ? 0 : ch.fresh_negatives + 1;

    Item item;
    item.t = now_;
    item.priority = kConfirmation;
    item.kind = ItemKind::Confirm;
    item.index = index;
    item.obs = std::move(obs);
    push(std::move(item));
  }

  void on_confirm(std::size_t index, const FrameObservation& obs) {
    auto& ch = channels_[index];
    auto result = update(ch.confirmation, obs, ch.window);
    ch.confirmation = std::move(result.state);
    if (!result.changed) return;
    log(now_, "confirmation",
        {{"type", "status"}, {"channel", ch.id}, {"status", std::string(to_string(result.status))}});

    if (ch.target == Target::Trespasser) {
      if (result.status == PresenceStatus::Confirmed) {
        send(ev::TrespasserConfirmed{});
      } else {
        send(ev::TrespasserCleared{});
      }
      return;
    }
    if (result.status == PresenceStatus::Confirmed) {
      on_train_confirmed(ch);
    } else {
      on_train_absent(ch);
    }
  }

  // --- kinematics ---------------------------------------------------------

  Track& create_track(const std::string& id, Direction direction, bool phantom) {
    Track t;
    t.id = id;
    t.direction = direction;
    t.phantom = phantom;
    t.stage_since = now_;
    auto& track = tracks_[id] = std::move(t);
    occupancy_.enter(sc_.geometry.approach_block(direction), Occupant{id, direction, now_});
    log_track(track, true);
    log_block(id);
    check_conflicts();
    return track;
  }

  void log_track(const Track& t, bool is_new) {
    log(now_, "kinematics",
        {{"type", "track"},
         {"train_id", t.id},
         {"direction", std::string(to_string(t.direction))},
         {"phantom", t.phantom},
         {"new", is_new},
         {"stage", std::string(to_string(t.stage))}});
  }

  void log_block(const std::string& id) {
    const auto block = occupancy_.block_of(id);
    log(now_, "kinematics",
        {{"type", "block"}, {"train_id", id}, {"block", block ? Json(*block) : Json(nullptr)}});
  }

  void set_estimate(Track& t, double position_m) {
    t.estimate = make_estimate(t.id, t.direction, position_m, t.velocity_mps, now_);
    log(now_, "kinematics", {{"type", "estimate"}, {"estimate", to_json(t.estimate)}});
  }

  void on_train_confirmed(Channel& ch) {
    std::string id;
    bool phantom = false;
    Direction direction = ch.direction;
    if (auto idx = train_in_view(ch, now_)) {
      id = sc_.trains[*idx].id;
      direction = sc_.trains[*idx].direction;
    } else {
      id = "phantom-" + std::to_string(++phantom_count_);
      phantom = true;
    }
    ch.track = id;

    if (retired_.count(id) != 0) {
      log(now_, "kinematics", {{"type", "late_sighting"}, {"channel", ch.id}, {"train_id", id}});
      return;
    }
    auto it = tracks_.find(id);
    switch (ch.role) {
      case CameraRole::UpstreamA: {
        if (it != tracks_.end()) return;
        auto& t = create_track(id, direction, phantom);
        t.first_point_at = now_;
        set_estimate(t, sc_.geometry.detection_distance_m);
        send(ev::TrainConfirmed{t.estimate, Sighting::Approach});
        return;
      }
      case CameraRole::UpstreamB: {
        Track& t = it != tracks_.end() ? it->second : create_track(id, direction, phantom);
        if (t.stage != Stage::Approaching || t.second_point_at) return;
        t.second_point_at = now_;
        if (t.first_point_at && now_ > *t.first_point_at) {
          t.velocity_mps = estimate_velocity(sc_.geometry.camera_spacing_m, *t.first_point_at, now_);
        }
        set_estimate(t, sc_.geometry.second_point_distance());
        log_schedule_deviation(t);
        send(ev::TrainConfirmed{t.estimate, Sighting::Approach});
        return;
      }
      case CameraRole::Junction: {
        Track& t = it != tracks_.end() ? it->second : create_track(id, direction, phantom);
        if (t.stage != Stage::Approaching) return;
        t.stage = Stage::AtJunction;
        t.stage_since = now_;
        log_track(t, false);
        set_estimate(t, 0.0);
        send(ev::TrainConfirmed{t.estimate, Sighting::Junction});
        return;
      }
      case CameraRole::FarSide: {
        if (it == tracks_.end()) {
          log(now_, "kinematics", {{"type", "unmatched_departure"}, {"channel", ch.id}, {"train_id", id}});
          return;
        }
        auto& t = it->second;
        if (t.stage == Stage::Departing) return;
        t.stage = Stage::Departing;
        t.stage_since = now_;
        log_track(t, false);
        occupancy_.enter(sc_.geometry.departure_block(t.direction), Occupant{id, t.direction, now_});
        log_block(id);
        check_conflicts();
        // The train clears the departure block once its tail has run its length.
        Millis hold = sc_.passage_timeout;
        if (t.velocity_mps) {
          const double run_m =
              sc_.geometry.detection_distance_m - sc_.geometry.far_side_m + train_length(id);
          hold = from_seconds(run_m / *t.velocity_mps);
        }
        if (within_run(now_ + hold)) {
          Item item;
          item.t = now_ + hold;
          item.priority = kWorld;
          item.kind = ItemKind::BlockRelease;
          item.train_id = id;
          push(std::move(item));
        }
        return;
      }
    }
  }

  void on_train_absent(Channel& ch) {
    auto id = std::exchange(ch.track, std::nullopt);
    if (!id) return;
    auto it = tracks_.find(*id);
    if (it == tracks_.end()) return;
    const Track& t = it->second;
    if (ch.role == CameraRole::FarSide && t.stage == Stage::Departing) {
      retire(*id, "departed");
    } else if (ch.role == CameraRole::Junction && t.stage == Stage::AtJunction &&
               !t.first_point_at && !t.second_point_at) {
      // Only ever seen at the crossing: its departure is the junction camera losing it.
      retire(*id, "departed");
    }
  }

  double train_length(const std::string& id) const {
    for (const auto& tr : sc_.trains) {
      if (tr.id == id) return tr.length_m;
    }
    return TrainMovement{}.length_m;
  }

  void log_schedule_deviation(const Track& t) {
    for (const auto& entry : sc_.timetable) {
      if (entry.train_id != t.id) continue;
      try {
        log(now_, "kinematics",
            {{"type", "schedule_deviation"},
             {"train_id", t.id},
             {"deviation_s", schedule_deviation(entry, t.estimate, now_)}});
      } catch (const UnavailableEstimateError&) {
        log(now_, "kinematics", {{"type", "schedule_deviation_unavailable"}, {"train_id", t.id}});
      }
    }
  }

  // Stops tracking a train and tells the controller it has gone.
  void retire(const std::string& id, const char* reason) {
    const bool expired = std::string_view(reason) != "departed";
    log(now_, "kinematics", {{"type", expired ? "track_expired" : "departed"}, {"train_id", id}});
    tracks_.erase(id);
    retired_.insert(id);
    if (expired && occupancy_.leave(id)) log_block(id);
    send(ev::TrainDeparted{id});
  }

  void on_block_release(const std::string& id) {
    if (tracks_.count(id) == 0 && occupancy_.leave(id)) log_block(id);
  }

  void check_conflicts() {
    for (const auto& c : head_on_conflict(occupancy_)) {
      std::string key = c.block_id;
      for (const auto& id : c.up_trains) key += "|" + id;
      key += "#";
      for (const auto& id : c.down_trains) key += "|" + id;
      if (!known_conflicts_.insert(key).second) continue;
      log(now_, "kinematics",
          {{"type", "conflict"}, {"block", c.block_id}, {"up", c.up_trains}, {"down", c.down_trains}});
      std::vector<std::string> involved = c.up_trains;
      involved.insert(involved.end(), c.down_trains.begin(), c.down_trains.end());
      for (const auto& id : involved) {
        notify(build_train_signal(id, "conflict-" + c.block_id, train_eta(id), sc_.junction_id, now_),
               RecipientKind::TrainOperator);
      }
    }
  }

  std::optional<double> train_eta(const std::string& id) const {
    auto it = tracks_.find(id);
    if (it == tracks_.end() || it->second.estimate.train_id.empty()) return std::nullopt;
    return eta_remaining(it->second.estimate, now_);
  }

  // --- world --------------------------------------------------------------

  void on_arrival(std::size_t index) {
    const auto& tr = sc_.trains[index];
    const bool down = barrier_ == Barrier::Down;
    const bool margin_ok = down && down_since_ <= now_ - sc_.controller.min_close_margin;
    Json margin = down ? Json(to_seconds(now_ - down_since_)) : Json(nullptr);
    log(now_, "world",
        {{"type", "train_arrival"},
         {"train_id", tr.id},
         {"direction", std::string(to_string(tr.direction))},
         {"barrier", std::string(to_string(barrier_))},
         {"closed_ms", down ? Json(down_since_.count()) : Json(nullptr)},
         {"margin_s", margin},
         {"safe", margin_ok}});
    if (!margin_ok) violation(tr.id, down ? "insufficient_margin" : "barrier_not_closed");
  }

  void violation(const std::string& train_id, const char* reason) {
    if (!violations_.insert(train_id + "/" + reason).second) return;
    spdlog::warn("safety violation at {} ms: train {} {}", now_.count(), train_id, reason);
    log(now_, "sim", {{"type", "violation"}, {"train_id", train_id}, {"reason", reason}});
  }

  // A train on the crossing while the road side is open or opening.
  void check_junction_occupancy() {
    if (barrier_ == Barrier::Down || barrier_ == Barrier::Lowering) return;
    for (const auto& tr : sc_.trains) {
      const double head = head_position(tr, now_);
      if (head >= 0.0 && head - tr.length_m <= 0.0) violation(tr.id, "junction_open_while_occupied");
    }
  }

  void set_barrier(Barrier b) {
    barrier_ = b;
    log(now_, "world", {{"type", "barrier"}, {"state", std::string(to_string(b))}});
  }

  void lower_barrier() {
    if (barrier_ == Barrier::Lowering || barrier_ == Barrier::Down) return;
    set_barrier(Barrier::Lowering);
    schedule_settle(sc_.controller.barrier_close_duration);
  }

  void raise_barrier() {
    if (barrier_ == Barrier::Raising || barrier_ == Barrier::Up) return;
    set_barrier(Barrier::Raising);
    schedule_settle(sc_.barrier_open_duration);
    check_junction_occupancy();
  }

  void schedule_settle(Millis after) {
    Item item;
    item.t = now_ + after;
    item.priority = kWorld;
    item.kind = ItemKind::BarrierSettled;
    item.generation = ++barrier_generation_;
    push(std::move(item));
  }

  void on_barrier_settled(std::uint64_t generation) {
    if (generation != barrier_generation_) return;
    if (barrier_ == Barrier::Lowering) {
      down_since_ = now_;
      set_barrier(Barrier::Down);
      send(ev::BarrierClosedAck{});
    } else if (barrier_ == Barrier::Raising) {
      set_barrier(Barrier::Up);
      send(ev::BarrierOpenedAck{});
    }
  }

  void on_outage(bool start) {
    log(now_, "world",
        {{"type", "outage"}, {"state", start ? "start" : "end"}, {"backup", sc_.backup_power}});
    if (sc_.backup_power) return;
    if (start) {
      if (outage_depth_++ == 0) {
        reset_fresh_negatives();
        send(ev::PowerLost{});
      }
    } else if (outage_depth_ > 0 && --outage_depth_ == 0) {
      send(ev::PowerRestored{});
    }
  }

  void reset_fresh_negatives() {
    for (auto& ch : channels_) ch.fresh_negatives = 0;
  }

  void on_tick() {
    if (!watchdog_fired_ && now_ - last_observation_ > sc_.controller.watchdog_timeout) {
      watchdog_fired_ = true;
      reset_fresh_negatives();
      deliver(ev::WatchdogExpired{});
    }
    expire_tracks();
    if (ctrl_.phase == JunctionState::FailSafe && !ctrl_.power_lost && !ctrl_.watchdog_expired &&
        track_clear()) {
      deliver(ev::TrackClear{});
    }
    check_junction_occupancy();
    deliver(ev::Tick{});
  }

  bool track_clear() const {
    return std::all_of(channels_.begin(), channels_.end(), [&](const Channel& ch) {
      return ch.target != Target::Train || ch.fresh_negatives >= ch.window.absence_len;
    });
  }

  void expire_tracks() {
    std::vector<std::string> expired;
    for (const auto& [id, t] : tracks_) {
      const Millis age = now_ - t.stage_since;
      bool stale = false;
      switch (t.stage) {
        case Stage::Approaching:
          stale = t.estimate.eta_s ? is_stale(t.estimate, now_) : age > sc_.unconfirmed_track_timeout;
          break;
        case Stage::AtJunction:
        case Stage::Departing:
          stale = age > sc_.passage_timeout;
          break;
      }
      if (stale) expired.push_back(id);
    }
    for (const auto& id : expired) retire(id, "expired");
  }

  // --- controller ---------------------------------------------------------

  void deliver(const EventBody& body) {
    const ControllerState before = ctrl_;
    auto tr = handle(ctrl_, ControllerEvent{now_, body}, sc_.controller);
    const bool is_tick = std::holds_alternative<ev::Tick>(body);
    if (!tr.handled) {
      if (!is_tick) {
        log(now_, "controller",
            {{"type", "ignored"},
             {"event", to_json(body)},
             {"state", std::string(to_string(before.phase))}});
      }
      return;
    }
    ctrl_ = std::move(tr.state);
    if (!(is_tick && tr.commands.empty() && same_apart_from_clock(before, ctrl_))) {
      log(now_, "controller",
          {{"type", "event"},
           {"event", to_json(body)},
           {"from", std::string(to_string(before.phase))},
           {"to", std::string(to_string(ctrl_.phase))}});
    }
    log_incident_changes(before);
    for (const auto& c : tr.commands) {
      log(now_, "controller", {{"type", "command"}, {"command", to_json(c)}});
      execute(c);
    }
  }

  void log_incident_changes(const ControllerState& before) {
    const auto& was = before.incident;
    const auto& is = ctrl_.incident;
    const bool same = was && is && was->incident.id == is->incident.id;
    if (was && !same) end_incident(was->incident, "cleared");
    if (is && !same) {
      log(now_, "controller", {{"type", "incident"}, {"status", "started"}, {"incident", to_json(is->incident)}});
    }
    if (is && is->level && (!same || was->level != is->level)) {
      log(now_, "controller",
          {{"type", "escalation"},
           {"incident_id", is->incident.id},
           {"level", std::string(to_string(*is->level))}});
    }
  }

  void end_incident(const Incident& incident, const char* reason) {
    log(now_, "controller",
        {{"type", "incident"}, {"status", "ended"}, {"reason", reason}, {"incident", to_json(incident)}});
  }

  void execute(const Command& c) {
    std::visit(
        [&](const auto& command) {
          using T = std::decay_t<decltype(command)>;
          if constexpr (std::is_same_v<T, cmd::LowerBarrier>) {
            lower_barrier();
          } else if constexpr (std::is_same_v<T, cmd::RaiseBarrier>) {
            raise_barrier();
          } else if constexpr (std::is_same_v<T, cmd::SendDistress>) {
            notify(build_distress(command.incident, command.severity, nearest_eta(ctrl_, now_),
                                  sc_.junction_id, now_),
                   RecipientKind::Police, RecipientKind::FireBrigade);
          } else if constexpr (std::is_same_v<T, cmd::SignalTrain>) {
            const std::string reason =
                ctrl_.incident ? "INC-" + std::to_string(ctrl_.incident->incident.id) : "signal";
            notify(build_train_signal(command.train_id, reason, train_eta(command.train_id),
                                      sc_.junction_id, now_),
                   RecipientKind::TrainOperator);
          }
        },
        c);
  }

  // --- notify -------------------------------------------------------------

  template <typename... Kinds>
  void notify(DistressMessage msg, Kinds... kinds) {
    std::vector<Recipient> to;
    for (const auto& spec : sc_.recipients) {
      if (((spec.recipient.kind == kinds) || ...)) to.push_back(spec.recipient);
    }
    if (to.empty()) {
      log(now_, "notify", {{"type", "undeliverable"}, {"message", to_json(msg)}});
      return;
    }
    outbox_.enqueue(std::move(msg), std::move(to));
    if (!flush_pending_) {
      flush_pending_ = true;
      push_at(now_, kNotify, ItemKind::NotifyFlush);
    }
  }

  void flush_notifications() {
    flush_pending_ = false;
    for (auto& result : outbox_.drain(transport_, sc_.retry, now_)) {
      Json recipients = Json::array();
      Json receipts = Json::array();
      for (const auto& r : result.receipts) {
        recipients.push_back(r.recipient_id);
        receipts.push_back(to_json(r));
      }
      log(now_, "notify",
          {{"type", "dispatch"},
           {"message", to_json(result.message)},
           {"recipients", std::move(recipients)},
           {"receipts", std::move(receipts)}});
    }
  }

  void finish() {
    if (ctrl_.incident) end_incident(ctrl_.incident->incident, "scenario_end");
    log(now_, "sim",
        {{"type", "run_end"},
         {"phase", std::string(to_string(ctrl_.phase))},
         {"barrier", std::string(to_string(barrier_))}});
  }

  const Scenario& sc_;
  const RunOptions& options_;
  std::uint64_t seed_;
  EventLog log_;
  std::priority_queue<Item, std::vector<Item>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  Millis now_{0};

  std::vector<Channel> channels_;
  std::map<std::string, Track> tracks_;
  std::set<std::string> retired_;
  BlockOccupancy occupancy_;
  std::set<std::string> known_conflicts_;
  int phantom_count_ = 0;

  ControllerState ctrl_;
  Barrier barrier_ = Barrier::Up;
  std::uint64_t barrier_generation_ = 0;
  Millis down_since_{0};
  int outage_depth_ = 0;
  Millis last_observation_{0};
  bool watchdog_fired_ = false;
  std::set<std::string> violations_;

  RoutingTransport transport_;
  DispatchQueue outbox_;
  bool flush_pending_ = false;
};

}  // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
  if (options.realtime && !(options.realtime_speed > 0.0)) {
    throw ArgumentError("realtime speed must be positive");
  }
  Simulation sim(scenario, options);
  EventLog log = sim.run();
  RunReport report = build_report(log);
  return RunResult{std::move(report), std::move(log)};
}

}  // namespace crossguard

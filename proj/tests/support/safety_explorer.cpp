#include "safety_explorer.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "crossguard/controller_json.hpp"

namespace crossguard::explore {
namespace {

enum class Barrier { Up, Lowering, Down, Raising };

struct Train {
  std::string id;
  Millis lead{0};
  Millis arrival{0};
  std::optional<Millis> departure;
  bool arrived = false;
  bool departed = false;
};

struct World {
  ControllerState ctrl;
  Millis now{0};
  Barrier barrier = Barrier::Up;
  Millis barrier_due{0};
  Millis down_since{0};
  std::vector<Train> trains;
  bool trespasser = false;
  bool power_lost = false;
  bool watchdog = false;
  std::vector<std::string> trace;
};

class Explorer {
 public:
  explicit Explorer(const Options& o) : o_(o) {}

  Result run() {
    World w;
    dfs(w, o_.depth);
    return std::move(result_);
  }

 private:
  void fail(const World& w, std::string property) {
    if (result_.violations.size() < 20) result_.violations.push_back({std::move(property), w.trace});
  }

  // Applies commands to the physical barrier.
  void actuate(World& w, const std::vector<Command>& commands) {
    for (const auto& c : commands) {
      if (std::holds_alternative<cmd::LowerBarrier>(c) &&
          (w.barrier == Barrier::Up || w.barrier == Barrier::Raising)) {
        w.barrier = Barrier::Lowering;
        w.barrier_due = w.now + o_.cfg.barrier_close_duration;
      } else if (std::holds_alternative<cmd::RaiseBarrier>(c) &&
                 (w.barrier == Barrier::Down || w.barrier == Barrier::Lowering)) {
        w.barrier = Barrier::Raising;
        w.barrier_due = w.now + o_.open_duration;
        for (const auto& t : w.trains) {
          if (t.arrived && !t.departed) fail(w, "barrier raised with a train on the crossing");
        }
      }
    }
  }

  void check_escalation(const World& w, const ControllerState& before, const Transition& tr) {
    const auto& was = before.incident;
    const auto& is = tr.state.incident;
    if (was && is && was->incident.id == is->incident.id && was->level &&
        (!is->level || *is->level < *was->level)) {
      fail(w, "escalation level decreased within an incident");
    }
    if (!is || !is->level) return;
    std::optional<AlarmLevel> last_distress;
    for (const auto& c : tr.commands) {
      if (const auto* s = std::get_if<cmd::SoundAlarm>(&c)) {
        if (*is->level >= AlarmLevel::Siren && s->level < AlarmLevel::Siren) {
          fail(w, "voice alert sounded after the incident reached the siren");
        }
      } else if (const auto* d = std::get_if<cmd::SendDistress>(&c)) {
        if (d->incident.id != is->incident.id) fail(w, "distress for a different incident");
        if (last_distress && d->severity < *last_distress) fail(w, "distress severity decreased");
        last_distress = d->severity;
      }
    }
  }

  void deliver(World& w, EventBody body) {
    const bool power_lost = std::holds_alternative<ev::PowerLost>(body);
    const ControllerState before = w.ctrl;
    auto tr = handle(w.ctrl, ControllerEvent{w.now, std::move(body)}, o_.cfg);
    check_escalation(w, before, tr);
    if (power_lost) {
      ++result_.power_losses_checked;
      const bool lowers = std::any_of(tr.commands.begin(), tr.commands.end(), [](const Command& c) {
        return std::holds_alternative<cmd::LowerBarrier>(c);
      });
      if (tr.state.phase != JunctionState::FailSafe || !lowers) {
        fail(w, "PowerLost did not lead to FailSafe with LowerBarrier");
      }
    }
    w.ctrl = std::move(tr.state);
    actuate(w, tr.commands);
  }

  // Next world-side happening strictly after nothing: barrier settling,
  // a train reaching the crossing, a train leaving it.
  std::optional<Millis> next_due(const World& w) const {
    std::optional<Millis> due;
    auto consider = [&](Millis t) {
      if (!due || t < *due) due = t;
    };
    if (w.barrier == Barrier::Lowering || w.barrier == Barrier::Raising) consider(w.barrier_due);
    for (const auto& t : w.trains) {
      if (!t.arrived) consider(t.arrival);
      if (t.arrived && !t.departed) consider(*t.departure);
    }
    return due;
  }

  void step_world(World& w, Millis t) {
    w.now = t;
    if ((w.barrier == Barrier::Lowering || w.barrier == Barrier::Raising) && w.barrier_due == t) {
      if (w.barrier == Barrier::Lowering) {
        w.barrier = Barrier::Down;
        w.down_since = t;
        deliver(w, ev::BarrierClosedAck{});
      } else {
        w.barrier = Barrier::Up;
        deliver(w, ev::BarrierOpenedAck{});
      }
    }
    for (std::size_t i = 0; i < w.trains.size(); ++i) {
      auto& train = w.trains[i];
      if (!train.arrived && train.arrival == t) {
        train.arrived = true;
        train.departure = t + o_.passage;
        ++result_.arrivals_checked;
        const bool lead_sufficient =
            train.lead >= o_.cfg.barrier_close_duration + o_.cfg.min_close_margin;
        const bool protected_in_time = w.barrier == Barrier::Down &&
                                       barrier_engaged(w.ctrl.phase) &&
                                       w.down_since <= t - o_.cfg.min_close_margin;
        if (lead_sufficient && !protected_in_time) fail(w, "train reached an unprotected crossing");
        auto estimate = make_estimate(train.id, Direction::Up, 0.0, 20.0, t);
        deliver(w, ev::TrainConfirmed{estimate, Sighting::Junction});
      } else if (train.arrived && !train.departed && *train.departure == t) {
        train.departed = true;
        deliver(w, ev::TrainDeparted{train.id});
      }
    }
  }

  void advance_to(World& w, Millis target) {
    while (auto due = next_due(w)) {
      if (*due > target) break;
      step_world(w, *due);
    }
    w.now = target;
  }

  std::string key(const World& w) const {
    std::ostringstream k;
    const auto rel = [&](Millis t) { return (t - w.now).count(); };
    k << static_cast<int>(w.barrier) << ':' << rel(w.barrier_due) << ':' << rel(w.down_since) << ':'
      << w.trespasser << w.power_lost << w.watchdog << '|';
    for (const auto& t : w.trains) {
      k << t.lead.count() << ',' << rel(t.arrival) << ',' << t.arrived << t.departed << ';';
    }
    auto state = w.ctrl;
    state.last_event_at.reset();
    auto j = to_json(state);
    if (state.incident) j["incident_age"] = rel(state.incident->incident.started_at);
    for (auto& [id, train] : state.trains) {
      j["age_" + id] = rel(train.estimate.estimated_at);
    }
    j.erase("incident");
    j.erase("trains");
    j.erase("next_incident_id");
    k << j.dump() << '|' << state.trains.size();
    for (const auto& [id, train] : state.trains) {
      k << id << train.at_junction << (train.estimate.eta_s ? *train.estimate.eta_s : -1.0);
    }
    if (state.incident) {
      k << static_cast<int>(state.incident->incident.kind)
        << (state.incident->level ? static_cast<int>(*state.incident->level) : -1);
    }
    return k.str();
  }

  void dfs(World& w, int remaining) {
    if (remaining == 0) {
      ++result_.traces;
      return;
    }
    auto [it, inserted] = visited_.try_emplace(key(w), remaining);
    if (!inserted) {
      if (it->second >= remaining) return;
      it->second = remaining;
    }
    ++result_.states;

    bool any = false;
    auto branch = [&](const std::string& label, auto&& apply) {
      World next = w;
      next.trace.push_back(label + " @" + std::to_string(w.now.count()));
      apply(next);
      any = true;
      dfs(next, remaining - 1);
    };

    if (static_cast<int>(w.trains.size()) < o_.max_trains) {
      for (auto lead : o_.leads) {
        branch("confirm train lead " + std::to_string(lead.count() / 1000) + "s", [&](World& n) {
          Train t;
          t.id = "T" + std::to_string(n.trains.size() + 1);
          t.lead = lead;
          t.arrival = n.now + lead;
          const double v = 20.0;
          auto estimate = make_estimate(t.id, Direction::Up, v * to_seconds(lead), v, n.now);
          n.trains.push_back(t);
          deliver(n, ev::TrainConfirmed{estimate, Sighting::Approach});
        });
      }
    }
    for (const auto& t : w.trains) {
      if (t.arrived) continue;
      branch("reconfirm " + t.id, [&](World& n) {
        const double v = 20.0;
        auto estimate = make_estimate(t.id, Direction::Up, v * to_seconds(t.arrival - n.now), v, n.now);
        deliver(n, ev::TrainConfirmed{estimate, Sighting::Approach});
      });
    }
    if (!w.trespasser) {
      branch("trespasser", [&](World& n) {
        n.trespasser = true;
        deliver(n, ev::TrespasserConfirmed{});
      });
    } else {
      branch("trespasser cleared", [&](World& n) {
        n.trespasser = false;
        deliver(n, ev::TrespasserCleared{});
      });
    }
    branch("suspicious", [&](World& n) {
      n.trespasser = true;
      deliver(n, ev::SuspiciousActivity{});
    });
    if (!w.power_lost) {
      branch("power lost", [&](World& n) {
        n.power_lost = true;
        deliver(n, ev::PowerLost{});
      });
    } else {
      branch("power restored", [&](World& n) {
        n.power_lost = false;
        deliver(n, ev::PowerRestored{});
      });
    }
    if (!w.watchdog) {
      branch("watchdog", [&](World& n) {
        n.watchdog = true;
        deliver(n, ev::WatchdogExpired{});
      });
    } else {
      branch("observations resumed", [&](World& n) {
        n.watchdog = false;
        deliver(n, ev::ObservationsResumed{});
      });
    }
    branch("track clear", [&](World& n) { deliver(n, ev::TrackClear{}); });
    branch("unknown departure", [&](World& n) { deliver(n, ev::TrainDeparted{"ghost"}); });
    branch("tick +15s", [&](World& n) {
      advance_to(n, n.now + std::chrono::seconds{15});
      deliver(n, ev::Tick{});
    });
    if (auto due = next_due(w)) {
      branch("wait", [&](World& n) { advance_to(n, *due); });
    }
    if (!any) ++result_.traces;
  }

  Options o_;
  Result result_;
  std::unordered_map<std::string, int> visited_;
};

}  // namespace

Result explore(const Options& options) { return Explorer(options).run(); }

}  // namespace crossguard::explore

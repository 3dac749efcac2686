#include "crossguard/notify.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <spdlog/spdlog.h>

#include "crossguard/errors.hpp"

namespace crossguard {
namespace {

std::string format_eta(std::optional<double> eta_s) {
  if (!eta_s) return "unknown";
  return std::to_string(std::llround(*eta_s)) + " s";
}

bool send_line(const std::string& endpoint, const std::string& line) {
  std::string target = endpoint;
  if (target.rfind("tcp://", 0) == 0) target.erase(0, 6);
  const auto colon = target.rfind(':');
  if (colon == std::string::npos) return false;
  const auto host = target.substr(0, colon);
  const auto port = target.substr(colon + 1);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &result) != 0) return false;
  int fd = -1;
  for (auto* ai = result; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) return false;

  const std::string payload = line + "\n";
  std::size_t sent = 0;
  while (sent < payload.size()) {
    const auto n = ::send(fd, payload.data() + sent, payload.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) break;
    sent += static_cast<std::size_t>(n);
  }
  ::close(fd);
  return sent == payload.size();
}

}  // namespace

std::string_view to_string(RecipientKind k) {
  switch (k) {
    case RecipientKind::Police: return "Police";
    case RecipientKind::FireBrigade: return "FireBrigade";
    case RecipientKind::TrainOperator: return "TrainOperator";
  }
  return "?";
}

RecipientKind parse_recipient_kind(std::string_view text) {
  for (auto k : {RecipientKind::Police, RecipientKind::FireBrigade, RecipientKind::TrainOperator}) {
    if (to_string(k) == text) return k;
  }
  throw ArgumentError("unknown recipient kind '" + std::string(text) + "'");
}

std::string DistressMessage::message_id() const {
  return incident_id + "/" + std::string(to_string(severity));
}

DistressMessage build_distress(const Incident& incident, AlarmLevel severity,
                               std::optional<double> eta_remaining_s,
                               const std::string& junction_id, Millis now) {
  if (severity < AlarmLevel::Distress) {
    throw PreconditionError("distress messages require severity Distress or TrainEmergency, got " +
                            std::string(to_string(severity)));
  }
  const auto elapsed = std::llround(to_seconds(now - incident.started_at));
  std::string desc = std::string(incident.kind == IncidentKind::Trespass ? "Trespasser"
                                                                         : "Suspicious activity") +
                     " at junction " + junction_id + " not cleared after " +
                     std::to_string(elapsed) + " s; next train ETA " + format_eta(eta_remaining_s);
  if (severity == AlarmLevel::TrainEmergency) desc += "; incoming train alerted";
  return DistressMessage{"INC-" + std::to_string(incident.id), severity, junction_id, now,
                         std::move(desc), eta_remaining_s};
}

DistressMessage build_train_signal(const std::string& train_id, const std::string& reason_id,
                                   std::optional<double> eta_remaining_s,
                                   const std::string& junction_id, Millis now) {
  return DistressMessage{reason_id + ":" + train_id, AlarmLevel::TrainEmergency, junction_id, now,
                         "Train " + train_id + ": obstruction at junction " + junction_id +
                             ", stop short of crossing; ETA " + format_eta(eta_remaining_s),
                         eta_remaining_s};
}

Json to_json(const DistressMessage& msg) {
  Json j;
  j["incident_id"] = msg.incident_id;
  j["severity"] = std::string(to_string(msg.severity));
  j["junction_id"] = msg.junction_id;
  j["t_ms"] = msg.timestamp.count();
  j["desc"] = msg.description;
  j["eta_s"] = msg.eta_remaining_s ? Json(*msg.eta_remaining_s) : Json(nullptr);
  return j;
}

DistressMessage message_from_json(const Json& j) {
  DistressMessage msg;
  msg.incident_id = j.at("incident_id").get<std::string>();
  msg.severity = parse_alarm_level(j.at("severity").get<std::string>());
  msg.junction_id = j.at("junction_id").get<std::string>();
  msg.timestamp = Millis{j.at("t_ms").get<std::int64_t>()};
  msg.description = j.at("desc").get<std::string>();
  if (!j.at("eta_s").is_null()) msg.eta_remaining_s = j.at("eta_s").get<double>();
  return msg;
}

Json to_json(const DeliveryReceipt& r) {
  Json j;
  j["message_id"] = r.message_id;
  j["recipient_id"] = r.recipient_id;
  j["attempts"] = r.attempts;
  j["outcome"] = r.outcome == DeliveryOutcome::Delivered ? "Delivered" : "Failed";
  j["completed_ms"] = r.completed_at.count();
  return j;
}

void RetryPolicy::validate() const {
  if (max_retries < 1) throw ArgumentError("max_retries must be at least 1");
  if (initial_backoff.count() < 0) throw ArgumentError("initial_backoff must not be negative");
  if (multiplier < 1) throw ArgumentError("multiplier must be at least 1");
}

Millis RetryPolicy::backoff_after(int attempt) const {
  Millis wait = initial_backoff;
  for (int i = 1; i < attempt; ++i) wait *= multiplier;
  return wait;
}

void LoopbackTransport::fail_next(const std::string& recipient_id, int count) {
  pending_failures_[recipient_id] = count;
}

void LoopbackTransport::fail_always(const std::string& recipient_id) {
  always_fail_[recipient_id] = true;
}

bool LoopbackTransport::deliver(const Recipient& recipient, const DistressMessage& msg, Millis at) {
  bool ok = true;
  if (always_fail_.count(recipient.id) != 0) {
    ok = false;
  } else if (auto it = pending_failures_.find(recipient.id);
             it != pending_failures_.end() && it->second > 0) {
    --it->second;
    ok = false;
  }
  attempts_.push_back(Attempt{recipient.id, msg, at, ok});
  return ok;
}

bool TcpTransport::deliver(const Recipient& recipient, const DistressMessage& msg, Millis) {
  const bool ok = send_line(recipient.endpoint, to_json(msg).dump());
  if (!ok) spdlog::warn("notify: delivery to {} at {} failed", recipient.id, recipient.endpoint);
  return ok;
}

std::vector<DeliveryReceipt> dispatch(const DistressMessage& msg,
                                      const std::vector<Recipient>& recipients,
                                      Transport& transport, const RetryPolicy& policy,
                                      Millis start) {
  if (recipients.empty()) throw ArgumentError("dispatch needs at least one recipient");
  policy.validate();
  std::vector<DeliveryReceipt> receipts;
  receipts.reserve(recipients.size());
  for (const auto& recipient : recipients) {
    DeliveryReceipt receipt{msg.message_id(), recipient.id, 0, DeliveryOutcome::Failed, start};
    Millis at = start;
    for (int attempt = 1; attempt <= policy.max_retries; ++attempt) {
      receipt.attempts = attempt;
      receipt.completed_at = at;
      if (transport.deliver(recipient, msg, at)) {
        receipt.outcome = DeliveryOutcome::Delivered;
        break;
      }
      at += policy.backoff_after(attempt);
    }
    receipts.push_back(std::move(receipt));
  }
  return receipts;
}

void DispatchQueue::enqueue(DistressMessage msg, std::vector<Recipient> recipients) {
  pending_.push_back(Pending{std::move(msg), std::move(recipients)});
}

std::vector<DispatchQueue::Result> DispatchQueue::drain(Transport& transport,
                                                        const RetryPolicy& policy, Millis now) {
  auto batch = std::exchange(pending_, {});
  std::stable_sort(batch.begin(), batch.end(), [](const Pending& a, const Pending& b) {
    return a.message.severity > b.message.severity;
  });
  std::vector<Result> results;
  results.reserve(batch.size());
  for (auto& p : batch) {
    auto receipts = dispatch(p.message, p.recipients, transport, policy, now);
    results.push_back(Result{std::move(p.message), std::move(receipts)});
  }
  return results;
}

}  // namespace crossguard

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crossguard/controller.hpp"
#include "crossguard/controller_json.hpp"
#include "crossguard/time.hpp"

namespace crossguard {

enum class RecipientKind { Police, FireBrigade, TrainOperator };

std::string_view to_string(RecipientKind k);
RecipientKind parse_recipient_kind(std::string_view text);

struct Recipient {
  std::string id;
  RecipientKind kind = RecipientKind::Police;
  std::string endpoint;
};

struct DistressMessage {
  std::string incident_id;
  AlarmLevel severity = AlarmLevel::Distress;
  std::string junction_id;
  Millis timestamp{0};
  std::string description;
  std::optional<double> eta_remaining_s;

  // Unique per (incident, severity).
  std::string message_id() const;
  bool operator==(const DistressMessage&) const = default;
};

// Throws PreconditionError for severities below Distress.
DistressMessage build_distress(const Incident& incident, AlarmLevel severity,
                               std::optional<double> eta_remaining_s,
                               const std::string& junction_id, Millis now);

// Advisory to a train operator: a specific train must stop short of the junction.
DistressMessage build_train_signal(const std::string& train_id, const std::string& reason_id,
                                   std::optional<double> eta_remaining_s,
                                   const std::string& junction_id, Millis now);

// Wire format: incident_id, severity, junction_id, t_ms, desc, eta_s (null when unknown).
Json to_json(const DistressMessage& msg);
DistressMessage message_from_json(const Json& j);

enum class DeliveryOutcome { Delivered, Failed };

struct DeliveryReceipt {
  std::string message_id;
  std::string recipient_id;
  int attempts = 0;
  DeliveryOutcome outcome = DeliveryOutcome::Failed;
  Millis completed_at{0};

  bool operator==(const DeliveryReceipt&) const = default;
};

Json to_json(const DeliveryReceipt& receipt);

// Attempts are made at start, start + b, start + b + 2b, ...
struct RetryPolicy {
  int max_retries = 3;  // total attempts per recipient
  Millis initial_backoff = std::chrono::seconds{1};
  int multiplier = 2;

  void validate() const;
  Millis backoff_after(int attempt) const;  // wait after the attempt-th failure
};

class Transport {
 public:
  virtual ~Transport() = default;
  // One delivery attempt at simulation time `at`; true on success.
  virtual bool deliver(const Recipient& recipient, const DistressMessage& msg, Millis at) = 0;
};

// Records every attempt in memory. Failures can be scripted per recipient.
class LoopbackTransport final : public Transport {
 public:
  struct Attempt {
    std::string recipient_id;
    DistressMessage message;
    Millis at{0};
    bool delivered = false;
  };

  // The next `count` attempts to `recipient_id` fail.
  void fail_next(const std::string& recipient_id, int count);
  void fail_always(const std::string& recipient_id);

  bool deliver(const Recipient& recipient, const DistressMessage& msg, Millis at) override;
  const std::vector<Attempt>& attempts() const { return attempts_; }

 private:
  std::map<std::string, int> pending_failures_;
  std::map<std::string, bool> always_fail_;
  std::vector<Attempt> attempts_;
};

// Sends each message as one JSON line to "host:port" (optionally prefixed
// with "tcp://"), one connection per attempt.
class TcpTransport final : public Transport {
 public:
  bool deliver(const Recipient& recipient, const DistressMessage& msg, Millis at) override;
};

// Delivers to every recipient independently with bounded retry on the
// simulation clock. Receipts follow the order of `recipients`. Throws
// ArgumentError when `recipients` is empty.
std::vector<DeliveryReceipt> dispatch(const DistressMessage& msg,
                                      const std::vector<Recipient>& recipients,
                                      Transport& transport, const RetryPolicy& policy,
                                      Millis start);

// Messages waiting for the next dispatch round. TrainEmergency messages go out
// before Distress; otherwise first in, first out.
class DispatchQueue {
 public:
  struct Result {
    DistressMessage message;
    std::vector<DeliveryReceipt> receipts;
  };

  void enqueue(DistressMessage msg, std::vector<Recipient> recipients);
  bool empty() const { return pending_.empty(); }
  std::size_t size() const { return pending_.size(); }
  std::vector<Result> drain(Transport& transport, const RetryPolicy& policy, Millis now);

 private:
  struct Pending {
    DistressMessage message;
    std::vector<Recipient> recipients;
  };
  std::vector<Pending> pending_;
};

}  // namespace crossguard

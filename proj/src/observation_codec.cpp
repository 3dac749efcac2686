#include "crossguard/observation_codec.hpp"

#include <netdb.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <nlohmann/json.hpp>

#include "crossguard/errors.hpp"

namespace crossguard {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 5> kFields{"src", "t_ms", "det", "cls", "conf"};

}  // namespace

void validate_observation(const FrameObservation& obs) {
  if (obs.source_id.empty()) throw ArgumentError("observation source_id is empty");
  if (obs.timestamp.count() < 0) throw ArgumentError("observation timestamp is negative");
  if (obs.detected != obs.object_class.has_value() || obs.detected != obs.confidence.has_value()) {
    throw ArgumentError("class and confidence must be present exactly when detected");
  }
  if (obs.confidence && !(*obs.confidence >= 0.0 && *obs.confidence <= 1.0)) {
    throw ArgumentError("confidence must lie in [0, 1]");
  }
}

FrameObservation parse_observation(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError("", std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("", "record is not a JSON object");

  for (const auto& [key, _] : j.items()) {
    if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
      throw ParseError(key, "unknown field");
    }
  }

  FrameObservation obs;
  if (!j.contains("src")) throw ParseError("src", "missing");
  if (!j["src"].is_string() || j["src"].get_ref<const std::string&>().empty()) {
    throw ParseError("src", "must be a non-empty string");
  }
  obs.source_id = j["src"].get<std::string>();

  if (!j.contains("t_ms")) throw ParseError("t_ms", "missing");
  const auto& t = j["t_ms"];
  if (t.is_number_unsigned()) {
    obs.timestamp = Millis{static_cast<std::int64_t>(t.get<std::uint64_t>())};
  } else if (t.is_number_integer() && t.get<std::int64_t>() >= 0) {
    obs.timestamp = Millis{t.get<std::int64_t>()};
  } else {
    throw ParseError("t_ms", "must be a non-negative integer");
  }

  if (!j.contains("det")) throw ParseError("det", "missing");
  if (!j["det"].is_boolean()) throw ParseError("det", "must be a boolean");
  obs.detected = j["det"].get<bool>();

  if (j.contains("cls")) {
    if (!obs.detected) throw ParseError("cls", "present on a non-detection");
    if (!j["cls"].is_string()) throw ParseError("cls", "must be a string");
    try {
      obs.object_class = parse_object_class(j["cls"].get<std::string>());
    } catch (const ArgumentError& e) {
      throw ParseError("cls", e.what());
    }
  } else if (obs.detected) {
    throw ParseError("cls", "missing on a detection");
  }

  if (j.contains("conf")) {
    if (!obs.detected) throw ParseError("conf", "present on a non-detection");
    const auto& c = j["conf"];
    if (!c.is_number()) throw ParseError("conf", "must be a number");
    const double conf = c.get<double>();
    if (!(conf >= 0.0 && conf <= 1.0)) throw ParseError("conf", "must lie in [0, 1]");
    obs.confidence = conf;
  } else if (obs.detected) {
    throw ParseError("conf", "missing on a detection");
  }
  return obs;
}

std::string serialize_observation(const FrameObservation& obs) {
  validate_observation(obs);
  ordered_json j;
  j["src"] = obs.source_id;
  j["t_ms"] = obs.timestamp.count();
  j["det"] = obs.detected;
  if (obs.detected) {
    j["cls"] = std::string(to_string(*obs.object_class));
    j["conf"] = *obs.confidence;
  }
  return j.dump();
}

FrameObservation ObservationDecoder::decode(std::string_view line) {
  auto obs = parse_observation(line);
  auto it = last_seen_.find(obs.source_id);
  if (it != last_seen_.end()) {
    if (obs.timestamp <= it->second) {
      throw OrderingError("t_ms: " + std::to_string(obs.timestamp.count()) + " from source '" +
                          obs.source_id + "' is not after " + std::to_string(it->second.count()));
    }
    it->second = obs.timestamp;
  } else {
    last_seen_.emplace(obs.source_id, obs.timestamp);
  }
  return obs;
}

std::optional<Millis> ObservationDecoder::last_timestamp(const std::string& source_id) const {
  auto it = last_seen_.find(source_id);
  if (it == last_seen_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> IstreamLineSource::next_line() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

TcpLineSource::TcpLineSource(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const auto service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result); rc != 0) {
    throw Error("resolve " + host + ": " + ::gai_strerror(rc));
  }
  for (auto* ai = result; ai != nullptr; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(result);
  if (fd_ < 0) throw Error("connect " + host + ":" + service + ": " + std::strerror(errno));
}

TcpLineSource::~TcpLineSource() {
  if (fd_ >= 0) ::close(fd_);
}

std::optional<std::string> TcpLineSource::next_line() {
  for (;;) {
    if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (eof_) {
      if (buffer_.empty()) return std::nullopt;
      return std::exchange(buffer_, {});
    }
    char chunk[4096];
    const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("recv: ") + std::strerror(errno));
    }
    if (n == 0) {
      eof_ = true;
    } else {
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }
}

std::size_t read_observations(LineSource& source, ObservationDecoder& decoder,
                              const std::function<void(FrameObservation)>& sink) {
  std::size_t delivered = 0;
  std::size_t line_no = 0;
  while (auto line = source.next_line()) {
    ++line_no;
    if (line->empty()) continue;
    FrameObservation obs;
    try {
      obs = decoder.decode(*line);
    } catch (const ParseError& e) {
      throw ParseError(e.field(), "line " + std::to_string(line_no) + ": " + e.detail());
    } catch (const OrderingError& e) {
      throw OrderingError("line " + std::to_string(line_no) + ": " + e.what());
    }
    sink(std::move(obs));
    ++delivered;
  }
  return delivered;
}

}  // namespace crossguard

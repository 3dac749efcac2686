#pragma once

// Newline-delimited JSON wire protocol between external detector processes and
// the controller:
//
//   {"src":"cam1","t_ms":1000,"det":true,"cls":"Train","conf":0.91}
//   {"src":"cam1","t_ms":1200,"det":false}
//
// `cls` and `conf` are present exactly when `det` is true. Unknown fields are
// rejected.

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "crossguard/detector.hpp"

namespace crossguard {

// Throws ParseError naming the offending field.
FrameObservation parse_observation(std::string_view line);

// Single-line encoding without trailing newline. Throws ArgumentError when the
// observation violates the detected/class/confidence invariant.
std::string serialize_observation(const FrameObservation& obs);

void validate_observation(const FrameObservation& obs);

// Stateful decoder enforcing strictly increasing timestamps per source.
class ObservationDecoder {
 public:
  FrameObservation decode(std::string_view line);

  std::optional<Millis> last_timestamp(const std::string& source_id) const;

 private:
  std::map<std::string, Millis, std::less<>> last_seen_;
};

// A byte stream split into lines.
class LineSource {
 public:
  virtual ~LineSource() = default;
  // Next line without its terminator; nullopt at end of stream.
  virtual std::optional<std::string> next_line() = 0;
};

class IstreamLineSource final : public LineSource {
 public:
  explicit IstreamLineSource(std::istream& in) : in_(in) {}
  std::optional<std::string> next_line() override;

 private:
  std::istream& in_;
};

// Client connection to a detector publishing the protocol over TCP.
class TcpLineSource final : public LineSource {
 public:
  TcpLineSource(const std::string& host, std::uint16_t port);
  ~TcpLineSource() override;
  TcpLineSource(const TcpLineSource&) = delete;
  TcpLineSource& operator=(const TcpLineSource&) = delete;

  std::optional<std::string> next_line() override;

 private:
  int fd_ = -1;
  std::string buffer_;
  bool eof_ = false;
};

// Decodes every non-empty line and hands it to `sink`. Errors are rethrown as
// ParseError/OrderingError prefixed with the 1-based line number. Returns the
// number of observations delivered.
std::size_t read_observations(LineSource& source, ObservationDecoder& decoder,
                              const std::function<void(FrameObservation)>& sink);

}  // namespace crossguard

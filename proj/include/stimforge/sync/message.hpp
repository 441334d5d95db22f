#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "stimforge/common/json.hpp"
#include "stimforge/eventlog/entry.hpp"

namespace stimforge::sync {

/// Wire kinds outside the event log.
inline constexpr std::string_view kHeartbeat = "Heartbeat";
inline constexpr std::string_view kTimePing = "TimePing";
inline constexpr std::string_view kTimePong = "TimePong";

/// One text frame on a subscriber connection. Logged events carry `seq`,
/// equal to the entry's index in the session log; Heartbeat and TimePong
/// are unsequenced.
struct SyncMessage {
  std::optional<std::uint64_t> seq;
  std::int64_t server_ts_ms = 0;
  std::string kind;
  Json payload = Json::object();
  bool operator==(const SyncMessage&) const = default;
};

Json to_json(const SyncMessage& message);
SyncMessage message_from_json(const Json& json);
std::string encode_message(const SyncMessage& message);
SyncMessage decode_message(std::string_view text);

/// Frame sent by a client: {"kind", "payload"}. Publishers send event
/// kinds with payload {"taskName"?, "details"} plus SessionPause,
/// SessionResume and SessionFinish; anyone may send TimePing {"t0"}.
struct ClientFrame {
  std::string kind;
  Json payload = Json::object();
};

/// Strict: unknown fields and non-object payloads are parse errors.
ClientFrame decode_client_frame(std::string_view text);

/// Payload is {"taskName"?, "details"}.
SyncMessage message_from_entry(std::uint64_t seq, const eventlog::LogEntry& entry);
eventlog::LogEntry entry_from_message(const SyncMessage& message);

}  // namespace stimforge::sync

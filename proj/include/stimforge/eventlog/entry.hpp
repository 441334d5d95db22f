#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "stimforge/common/json.hpp"

namespace stimforge::eventlog {

/// Event type names written to `eventType`.
namespace event {
inline constexpr std::string_view kSessionCreated = "SessionCreated";
inline constexpr std::string_view kSessionStart = "SessionStart";
inline constexpr std::string_view kSessionPause = "SessionPause";
inline constexpr std::string_view kSessionResume = "SessionResume";
inline constexpr std::string_view kSessionFinish = "SessionFinish";
inline constexpr std::string_view kPublisherReattach = "PublisherReattach";
inline constexpr std::string_view kConfigSnapshot = "ConfigSnapshot";
inline constexpr std::string_view kTaskStart = "TaskStart";
inline constexpr std::string_view kTaskEnd = "TaskEnd";
inline constexpr std::string_view kVisualDot = "VisualDot";
inline constexpr std::string_view kCue = "Cue";
inline constexpr std::string_view kResponse = "Response";
}  // namespace event

bool is_known_event_type(std::string_view type);
/// VisualDot and Cue: events that describe what was presented.
bool is_stimulus_event(std::string_view type);

/// One line of a session log.
struct LogEntry {
  std::int64_t timestamp = 0;
  std::string event_type;
  std::optional<std::string> task_name;
  Json details = Json::object();
  bool operator==(const LogEntry&) const = default;
};

Json to_json(const LogEntry& entry);
LogEntry entry_from_json(const Json& json);

/// Compact single-line encoding without the trailing newline.
std::string encode_entry(const LogEntry& entry);

}  // namespace stimforge::eventlog

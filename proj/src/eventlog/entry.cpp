#include "stimforge/eventlog/entry.hpp"

#include <array>

namespace stimforge::eventlog {
namespace {

constexpr std::array<std::string_view, 12> kKnown{
    event::kSessionCreated, event::kSessionStart, event::kSessionPause, event::kSessionResume,
    event::kSessionFinish,  event::kPublisherReattach, event::kConfigSnapshot, event::kTaskStart,
    event::kTaskEnd,        event::kVisualDot,      event::kCue,            event::kResponse};

}  // namespace

bool is_known_event_type(std::string_view type) {
  for (auto k : kKnown) {
    if (k == type) return true;
  }
  return false;
}

bool is_stimulus_event(std::string_view type) {
  return type == event::kVisualDot || type == event::kCue;
}

Json to_json(const LogEntry& entry) {
  Json j{{"timestamp", entry.timestamp}, {"eventType", entry.event_type}, {"details", entry.details}};
  if (entry.task_name) j["taskName"] = *entry.task_name;
  return j;
}

LogEntry entry_from_json(const Json& json) {
  ObjectReader r(json, "entry");
  LogEntry e;
  e.timestamp = r.get<std::int64_t>("timestamp");
  e.event_type = r.get<std::string>("eventType");
  if (r.has("taskName")) e.task_name = r.get<std::string>("taskName");
  e.details = r.has("details") ? r.at("details") : Json::object();
  if (!e.details.is_object()) throw Error(Errc::parse_error, "entry.details: expected an object");
  r.finish();
  return e;
}

std::string encode_entry(const LogEntry& entry) { return to_json(entry).dump(); }

}  // namespace stimforge::eventlog

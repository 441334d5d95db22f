#include "stimforge/sync/message.hpp"

#include "stimforge/common/error.hpp"

namespace stimforge::sync {

Json to_json(const SyncMessage& m) {
  Json j{{"server_ts_ms", m.server_ts_ms}, {"kind", m.kind}, {"payload", m.payload}};
  j["seq"] = m.seq ? Json(*m.seq) : Json(nullptr);
  return j;
}

SyncMessage message_from_json(const Json& json) {
  ObjectReader r(json, "message");
  SyncMessage m;
  if (!r.at("seq").is_null()) m.seq = r.get<std::uint64_t>("seq");
  m.server_ts_ms = r.get<std::int64_t>("server_ts_ms");
  m.kind = r.get<std::string>("kind");
  m.payload = r.at("payload");
  r.finish();
  return m;
}

std::string encode_message(const SyncMessage& m) { return to_json(m).dump(); }

SyncMessage decode_message(std::string_view text) { return message_from_json(parse_json(text)); }

ClientFrame decode_client_frame(std::string_view text) {
  const Json j = parse_json(text);
  if (!j.is_object()) throw Error(Errc::parse_error, "frame: expected a JSON object");
  ObjectReader r(j, "frame");
  ClientFrame f;
  f.kind = r.get<std::string>("kind");
  if (r.has("payload")) f.payload = r.at("payload");
  r.finish();
  if (!f.payload.is_object()) throw Error(Errc::parse_error, "frame.payload: expected an object");
  return f;
}

SyncMessage message_from_entry(std::uint64_t seq, const eventlog::LogEntry& e) {
  SyncMessage m;
  m.seq = seq;
  m.server_ts_ms = e.timestamp;
  m.kind = e.event_type;
  m.payload = {{"details", e.details}};
  if (e.task_name) m.payload["taskName"] = *e.task_name;
  return m;
}

eventlog::LogEntry entry_from_message(const SyncMessage& m) {
  if (!m.seq) throw Error(Errc::invalid_argument, "unsequenced message is not a log entry");
  eventlog::LogEntry e;
  e.timestamp = m.server_ts_ms;
  e.event_type = m.kind;
  e.details = m.payload.value("details", Json::object());
  if (m.payload.contains("taskName")) e.task_name = m.payload.at("taskName").get<std::string>();
  return e;
}

}  // namespace stimforge::sync

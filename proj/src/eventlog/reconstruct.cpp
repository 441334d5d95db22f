#include "stimforge/eventlog/reconstruct.hpp"

#include "stimforge/common/error.hpp"

namespace stimforge::eventlog {

namespace ev = event;

Timeline reconstruct(const SessionLog& log, bool strict) {
  Timeline tl;
  tl.header = log.header;
  std::optional<TaskRecord> open;
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    const auto& e = log.entries[i];
    const std::string where = "entry " + std::to_string(i) + " (" + e.event_type + ")";
    if (!is_known_event_type(e.event_type)) {
      if (strict) throw Error(Errc::parse_error, where + ": unknown eventType");
      if (open) open->other.push_back(e);
      else tl.session_events.push_back(e);
      continue;
    }
    if (e.event_type == ev::kTaskStart) {
      if (open) throw Error(Errc::unbalanced, where + ": task '" + open->step_id + "' is still open");
      TaskRecord t;
      t.start_entry = i;
      t.task_name = e.task_name.value_or("");
      t.start_ts = e.timestamp;
      t.start_details = e.details;
      t.step_id = e.details.value("stepId", "");
      t.step_index = e.details.value("stepIndex", std::int64_t{-1});
      t.task_type = e.details.value("taskType", "");
      if (auto s = e.details.find("currentSettings"); s != e.details.end()) t.settings = *s;
      open = std::move(t);
    } else if (e.event_type == ev::kTaskEnd) {
      if (!open) throw Error(Errc::unbalanced, where + ": no open task");
      open->end_entry = i;
      open->end_ts = e.timestamp;
      open->end_details = e.details;
      tl.tasks.push_back(std::move(*open));
      open.reset();
    } else if (is_stimulus_event(e.event_type)) {
      if (!open) throw Error(Errc::unbalanced, where + ": stimulus outside a task");
      open->stimuli.push_back(e);
      open->stimulus_entries.push_back(i);
    } else if (e.event_type == ev::kResponse) {
      if (!open) throw Error(Errc::unbalanced, where + ": response outside a task");
      open->responses.push_back(e);
      open->response_entries.push_back(i);
    } else {
      tl.session_events.push_back(e);
    }
  }
  if (open) throw Error(Errc::unbalanced, "task '" + open->step_id + "' has no TaskEnd");
  return tl;
}

Json to_json(const Timeline& tl) {
  Json tasks = Json::array();
  for (const auto& t : tl.tasks) {
    Json stimuli = Json::array();
    for (const auto& s : t.stimuli) stimuli.push_back(to_json(s));
    Json responses = Json::array();
    for (const auto& r : t.responses) responses.push_back(to_json(r));
    tasks.push_back({{"taskName", t.task_name},
                     {"stepId", t.step_id},
                     {"stepIndex", t.step_index},
                     {"taskType", t.task_type},
                     {"startTimestamp", t.start_ts},
                     {"endTimestamp", t.end_ts},
                     {"settings", t.settings},
                     {"startDetails", t.start_details},
                     {"endDetails", t.end_details},
                     {"stimuli", std::move(stimuli)},
                     {"responses", std::move(responses)}});
  }
  Json session = Json::array();
  for (const auto& e : tl.session_events) session.push_back(to_json(e));
  return {{"header", to_json(tl.header)}, {"tasks", std::move(tasks)}, {"sessionEvents", std::move(session)}};
}

}  // namespace stimforge::eventlog

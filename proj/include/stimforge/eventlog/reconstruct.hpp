#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stimforge/eventlog/session_log.hpp"

namespace stimforge::eventlog {

/// One task as recovered from its TaskStart..TaskEnd bracket.
struct TaskRecord {
  std::size_t start_entry = 0;
  std::size_t end_entry = 0;
  std::string task_name;
  std::string step_id;
  std::int64_t step_index = -1;
  std::string task_type;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  /// currentSettings from the TaskStart snapshot.
  Json settings = nullptr;
  Json start_details = Json::object();
  Json end_details = Json::object();
  /// VisualDot and Cue entries in log order, with absolute timestamps.
  std::vector<LogEntry> stimuli;
  std::vector<LogEntry> responses;
  /// Entry indices of the stimuli and responses (parallel vectors).
  std::vector<std::size_t> stimulus_entries;
  std::vector<std::size_t> response_entries;
  /// Unknown event types inside the task (non-strict mode only).
  std::vector<LogEntry> other;
};

struct Timeline {
  LogHeader header;
  std::vector<TaskRecord> tasks;
  /// Session-level entries outside any task (lifecycle, snapshots).
  std::vector<LogEntry> session_events;
};

/// Groups the log into tasks. Throws unbalanced for nested, unmatched or
/// unterminated task brackets and for stimuli outside a task; in strict
/// mode an unknown eventType throws parse_error.
Timeline reconstruct(const SessionLog& log, bool strict = true);

Json to_json(const Timeline& timeline);

}  // namespace stimforge::eventlog

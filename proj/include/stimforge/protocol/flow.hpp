#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stimforge/common/json.hpp"
#include "stimforge/protocol/settings.hpp"
#include "stimforge/protocol/task_type.hpp"

namespace stimforge::protocol {

inline constexpr std::string_view kFlowSchemaVersion = "stimforge.flow/1";

/// One task in a flow. `overrides` is a partial settings document (same
/// keys as SettingsPreset JSON, groups may be partial) merged field-wise
/// over the flow's global preset.
struct FlowStep {
  std::string step_id;
  TaskType task_type = TaskType::FixationHorizontal;
  Json overrides = Json::object();
  std::optional<std::uint64_t> seed;
  bool operator==(const FlowStep&) const = default;
};

struct ExperimentFlow {
  std::string flow_id;
  std::string name;
  std::string schema_version{kFlowSchemaVersion};
  SettingsPreset global_preset;
  std::vector<FlowStep> steps;
  std::int64_t created_utc_ms = 0;
  bool operator==(const ExperimentFlow&) const = default;
};

/// Canonical UTF-8 JSON document (sorted keys, two-space indent, trailing newline).
std::string serialize_flow(const ExperimentFlow& flow);

/// Throws ParseError (with byte offset) on malformed text, Error(version_error)
/// on an unknown schema_version, Error(parse_error) on unknown or ill-typed fields.
ExperimentFlow parse_flow(std::string_view text);

/// SHA-256 of the canonical serialization; recorded in session log headers.
std::string flow_hash(const ExperimentFlow& flow);

/// Global preset with the step's overrides applied. The flow is not modified.
SettingsPreset resolve_step_settings(const ExperimentFlow& flow, std::size_t step_index);

/// Field-wise merge of a partial settings document into a full one.
Json merge_overrides(const Json& base, const Json& overrides);

/// Zero-based count of earlier steps sharing this step's task type.
int instance_index(const ExperimentFlow& flow, std::size_t step_index);

}  // namespace stimforge::protocol

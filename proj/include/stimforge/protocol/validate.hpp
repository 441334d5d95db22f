#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stimforge/protocol/flow.hpp"

namespace stimforge::tasks {
class MediaStore;
}

namespace stimforge::protocol {

enum class Severity { Error, Warning };
std::string_view to_string(Severity s);

struct ValidationIssue {
  std::optional<std::string> step_id;
  /// Settings field in snake case ("grid_rows", "pursuit.velocity_deg_s"),
  /// or a flow-level name ("step_id", "seed", "overrides.gridRows").
  std::string field;
  Severity severity = Severity::Error;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const;
};

Json to_json(const ValidationReport& report);

/// Constraint violations of a single preset.
std::vector<ValidationIssue> validate_preset(const SettingsPreset& preset);

/// Every violation in the flow. Issues of the global preset are reported
/// once; step issues cover the step's resolved settings where they differ.
/// Each error-free step is also planned, so ok() means the runtime can
/// execute the flow. Content steps referring to uploaded media need `store`.
ValidationReport validate_flow(const ExperimentFlow& flow, const tasks::MediaStore* store = nullptr);

/// Top-level override keys a task type accepts.
bool override_key_allowed(TaskType type, std::string_view key);

}  // namespace stimforge::protocol

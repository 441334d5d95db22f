#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stimforge/common/json.hpp"
#include "stimforge/markers/ids.hpp"
#include "stimforge/protocol/flow.hpp"
#include "stimforge/tasks/cognitive.hpp"
#include "stimforge/tasks/content.hpp"
#include "stimforge/tasks/questionnaire.hpp"
#include "stimforge/trajectory/pursuit.hpp"

namespace stimforge::engine {

/// A VisualDot or Cue the presenter shows, relative to content start.
struct PlannedEvent {
  std::int64_t offset_ms = 0;
  std::string event_type;
  Json details;
  bool operator==(const PlannedEvent&) const = default;
};

/// Everything a step presents.
///
/// Step timeline: TaskStart (start marker shown for the marker display
/// window), content for content_ms, TaskEnd (end marker shown for the same
/// window). Steps without markers have no lead or tail.
struct StepPlan {
  std::size_t step_index = 0;
  std::string step_id;
  protocol::TaskType task_type = protocol::TaskType::FixationHorizontal;
  std::string task_name;
  int instance_index = 0;
  std::uint64_t seed = 0;
  protocol::SettingsPreset settings;
  std::optional<markers::MarkerPair> markers;
  std::int64_t lead_ms = 0;
  std::int64_t content_ms = 0;
  std::int64_t tail_ms = 0;
  std::vector<PlannedEvent> stimuli;

  /// Trial data the responder and the scorers need.
  std::optional<tasks::NBackSequence> nback;
  std::vector<tasks::StroopTrial> stroop;
  std::optional<tasks::Instrument> instrument;
  bool weighted = false;
};

/// Milliseconds a headless participant spends per questionnaire item.
inline constexpr std::int64_t kQuestionnaireItemMs = 2000;

/// Throws whatever the generators throw for settings they cannot realise.
StepPlan plan_step(const protocol::ExperimentFlow& flow, std::size_t step_index, const tasks::MediaStore* store);

std::vector<StepPlan> plan_session(const protocol::ExperimentFlow& flow, const tasks::MediaStore* store);

/// Motion mode of a pursuit task type; throws invalid_argument otherwise.
trajectory::PursuitMode pursuit_mode_of(protocol::TaskType type);

/// Closed-form positions of a pursuit step sampled every 1000 / rate_hz ms
/// from 0 to the end of the motion. A presenter that reproduces these
/// within 1e-6 px draws the same path the log describes.
Json pursuit_vectors(const StepPlan& plan, double rate_hz);

/// Presenter-facing view: timing, markers, settings and the stimulus list.
/// Pursuit steps also carry their trip table.
Json to_json(const StepPlan& plan);

}  // namespace stimforge::engine

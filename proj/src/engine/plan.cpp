#include "stimforge/engine/plan.hpp"

#include <cmath>

#include "stimforge/common/error.hpp"
#include "stimforge/eventlog/entry.hpp"
#include "stimforge/trajectory/fixation.hpp"
#include "stimforge/trajectory/pursuit.hpp"

namespace stimforge::engine {
namespace {

using protocol::TaskFamily;
using protocol::TaskType;
using trajectory::DisplayGeometry;
using trajectory::TimedTarget;
namespace ev = eventlog::event;

Json base_details(const StepPlan& p, std::string_view kind, std::size_t index) {
  return {{"taskName", p.task_name}, {"stepId", p.step_id}, {"kind", kind}, {"index", index}};
}

Json dot_details(const StepPlan& p, std::string_view kind, std::size_t index, double x_px, double y_px,
                 const DisplayGeometry& g) {
  Json d = base_details(p, kind, index);
  d["xPx"] = x_px;
  d["yPx"] = y_px;
  d["xCm"] = g.x_cm(x_px);
  d["yCm"] = g.y_cm(y_px);
  d["dotType"] = protocol::to_string(p.settings.fixation_dot_type);
  d["dotPolarity"] = protocol::to_string(p.settings.polarity);
  return d;
}

Json target_details(const StepPlan& p, std::string_view kind, std::size_t index, const TimedTarget& t,
                    const DisplayGeometry& g) {
  Json d = dot_details(p, kind, index, t.x_px, t.y_px, g);
  d["durationMs"] = t.duration_ms;
  d["label"] = t.label;
  d["stimulus"] = trajectory::to_string(t.kind);
  d["sizeDeg"] = t.size_deg;
  if (t.kind == trajectory::TargetKind::E) d["orientation"] = trajectory::to_string(t.orientation);
  if (t.kind == trajectory::TargetKind::ShrinkingDot) d["endSizeDeg"] = t.end_size_deg;
  return d;
}

void add(StepPlan& p, std::int64_t offset, std::string_view type, Json details) {
  p.stimuli.push_back({offset, std::string(type), std::move(details)});
}

void plan_fixation(StepPlan& p, trajectory::FixationMode mode) {
  const auto g = trajectory::display_geometry(p.settings);
  const auto targets = trajectory::fixation_sequence(p.settings, mode, p.seed);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    add(p, targets[i].onset_ms, ev::kVisualDot, target_details(p, "fixation", i, targets[i], g));
  }
  p.content_ms = targets.back().onset_ms + targets.back().duration_ms;
}

void plan_pursuit(StepPlan& p, trajectory::PursuitMode mode) {
  const trajectory::PursuitTrajectory traj(trajectory::pursuit_params(p.settings, mode, p.seed), p.settings);
  const auto& g = traj.geometry();
  const auto samples = trajectory::pursuit_log_samples(traj, p.settings.pursuit.sample_interval_ms);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Json d = dot_details(p, "pursuit", i, samples[i].x_px, samples[i].y_px, g);
    d["trip"] = samples[i].trip;
    add(p, samples[i].t_ms, ev::kVisualDot, std::move(d));
  }
  p.content_ms = static_cast<std::int64_t>(std::ceil(traj.duration_ms()));
}

tasks::TrialTiming timing_of(const protocol::SettingsPreset& s) {
  return {s.cognitive.stimulus_ms, s.cognitive.inter_stimulus_ms};
}

void plan_nback(StepPlan& p, tasks::NBackModality modality) {
  const auto& c = p.settings.cognitive;
  p.nback = tasks::generate_nback(modality, c.nback_n, c.nback_trials, c.nback_target_rate, timing_of(p.settings), p.seed);
  for (const auto& t : p.nback->trials) {
    Json d = base_details(p, "nback-stimulus", static_cast<std::size_t>(t.index));
    d["modality"] = tasks::to_string(modality);
    d["n"] = p.nback->n;
    d["stimulus"] = t.stimulus;
    d["isTarget"] = t.is_target;
    d["durationMs"] = c.stimulus_ms;
    d["responseWindowMs"] = t.response_window_ms;
    add(p, t.onset_ms, ev::kCue, std::move(d));
  }
  p.content_ms = static_cast<std::int64_t>(p.nback->trials.size()) * timing_of(p.settings).window_ms();
}

void plan_stroop(StepPlan& p, tasks::StroopVariant variant) {
  const auto& c = p.settings.cognitive;
  tasks::StroopOptions o{timing_of(p.settings), c.stroop_incongruent_ratio, c.stroop_fast_window_factor};
  p.stroop = tasks::generate_stroop(variant, c.stroop_trials, o, p.seed);
  for (const auto& t : p.stroop) {
    Json d = base_details(p, "stroop-stimulus", static_cast<std::size_t>(t.index));
    d["variant"] = tasks::to_string(variant);
    d["word"] = t.word;
    d["ink"] = t.ink;
    d["congruent"] = t.congruent;
    d["durationMs"] = c.stimulus_ms;
    d["responseWindowMs"] = t.response_window_ms;
    add(p, t.onset_ms, ev::kCue, std::move(d));
  }
  p.content_ms = static_cast<std::int64_t>(p.stroop.size()) * o.timing.window_ms();
}

void plan_arrow(StepPlan& p, tasks::ArrowLevel level) {
  const auto& c = p.settings.cognitive;
  if (c.arrow_cell_ms <= 0) throw Error(Errc::invalid_argument, "arrow: cell duration must be positive");
  const auto path = tasks::generate_arrow_path(level, p.seed, c.arrow_moves);
  const auto g = trajectory::display_geometry(p.settings);
  const auto& r = g.interior;
  Json head = base_details(p, "arrow-path", 0);
  head["level"] = tasks::to_string(level);
  head["turnCount"] = path.turn_count;
  head["moves"] = c.arrow_moves;
  head["gridSize"] = path.grid_size;
  add(p, 0, ev::kCue, std::move(head));
  for (std::size_t i = 0; i < path.cells.size(); ++i) {
    const auto& cell = path.cells[i];
    const double x = r.x0 + (cell.col + 0.5) * r.width() / path.grid_size;
    const double y = r.y0 + (cell.row + 0.5) * r.height() / path.grid_size;
    // Arrow points along the next move; the last cell keeps the final heading.
    const auto& a = path.cells[i + 1 < path.cells.size() ? i : i - 1];
    const auto& b = path.cells[i + 1 < path.cells.size() ? i + 1 : i];
    const char* dir = b.row < a.row ? "up" : b.row > a.row ? "down" : b.col < a.col ? "left" : "right";
    Json d = dot_details(p, "arrow", i, x, y, g);
    d["row"] = cell.row;
    d["col"] = cell.col;
    d["direction"] = dir;
    d["durationMs"] = c.arrow_cell_ms;
    add(p, static_cast<std::int64_t>(i) * c.arrow_cell_ms, ev::kVisualDot, std::move(d));
  }
  p.content_ms = static_cast<std::int64_t>(path.cells.size()) * c.arrow_cell_ms;
}

void plan_blink(StepPlan& p, tasks::BlinkVariant variant) {
  const auto& b = p.settings.blink;
  const int interval = variant == tasks::BlinkVariant::Long ? b.long_interval_ms : b.short_interval_ms;
  const auto cues = tasks::blink_schedule(variant, interval, b.cue_count);
  for (const auto& c : cues) {
    Json d = base_details(p, "blink-cue", static_cast<std::size_t>(c.index));
    d["variant"] = tasks::to_string(variant);
    d["cueKind"] = tasks::to_string(c.kind);
    d["text"] = c.text;
    d["beep"] = c.beep;
    add(p, c.onset_ms, ev::kCue, std::move(d));
  }
  p.content_ms = static_cast<std::int64_t>(cues.size()) * interval;
}

void plan_slippage(StepPlan& p) {
  const auto g = trajectory::display_geometry(p.settings);
  const auto steps = trajectory::slippage_sequence(p.settings);
  std::size_t dot_index = 0;
  for (const auto& s : steps) {
    Json d = base_details(p, "slippage-step", static_cast<std::size_t>(s.step_index - 1));
    d["slippageStep"] = s.step_index;
    d["stepKind"] = trajectory::to_string(s.kind);
    d["instruction"] = s.instruction_text;
    d["durationMs"] = s.duration_ms;
    d["markerId"] = s.marker_id;
    add(p, s.onset_ms, ev::kCue, std::move(d));
    for (const auto& t : s.targets) {
      Json td = target_details(p, "slippage-target", dot_index++, t, g);
      td["slippageStep"] = s.step_index;
      add(p, t.onset_ms, ev::kVisualDot, std::move(td));
    }
  }
  p.content_ms = steps.back().onset_ms + steps.back().duration_ms;
}

void plan_vergence(StepPlan& p) {
  const auto& v = p.settings.vergence;
  const auto steps = trajectory::vergence_schedule(v.depths_cm, v.dwell_ms, v.marker_mode);
  const auto g = trajectory::display_geometry(p.settings);
  const double cx = g.interior.center_x(), cy = g.interior.center_y();
  for (const auto& s : steps) {
    Json d = dot_details(p, "vergence", static_cast<std::size_t>(s.index), cx, cy, g);
    d["depthCm"] = s.depth_cm;
    d["durationMs"] = s.duration_ms;
    if (s.marker_id) d["markerId"] = *s.marker_id;
    add(p, s.onset_ms, ev::kVisualDot, std::move(d));
  }
  p.content_ms = steps.back().onset_ms + steps.back().duration_ms;
}

void plan_calibration(StepPlan& p, int n) {
  const auto g = trajectory::display_geometry(p.settings);
  const auto layout = trajectory::calibration_points(n, p.settings);
  std::size_t i = 0;
  std::int64_t end = 0;
  for (const auto* list : {&layout.calibration, &layout.validation}) {
    const char* kind = list == &layout.calibration ? "calibration" : "validation";
    for (const auto& t : *list) {
      add(p, t.onset_ms, ev::kVisualDot, target_details(p, kind, i++, t, g));
      end = t.onset_ms + t.duration_ms;
    }
  }
  p.content_ms = end;
}

void plan_content(StepPlan& p, tasks::ContentKind kind, const tasks::MediaStore* store) {
  const auto desc = tasks::content_step(kind, p.settings.content.media_ref, p.settings.content.duration_ms, store);
  Json d = base_details(p, "content", 0);
  const Json dj = tasks::to_json(desc);
  for (const auto& [k, v] : dj.items()) d[k == "kind" ? "contentKind" : k] = v;
  add(p, 0, ev::kCue, std::move(d));
  p.content_ms = desc.duration_ms;
}

void plan_questionnaire(StepPlan& p) {
  const auto& q = p.settings.questionnaire;
  switch (p.task_type) {
    case TaskType::QuestionnaireDemographics: p.instrument = tasks::builtin_instrument("demographics"); break;
    case TaskType::QuestionnaireNasaTlx:
      p.instrument = tasks::builtin_instrument("nasa-tlx");
      p.weighted = q.nasa_tlx_weighted;
      break;
    case TaskType::QuestionnaireBfi10: p.instrument = tasks::builtin_instrument("bfi10"); break;
    default:
      if (q.custom_instrument.is_null()) {
        throw Error(Errc::invalid_argument, "questionnaire-custom needs questionnaire.customInstrument");
      }
      p.instrument = tasks::parse_instrument(q.custom_instrument);
      break;
  }
  const auto items = tasks::presented_items(*p.instrument, p.weighted);
  Json d = base_details(p, "questionnaire", 0);
  d["instrumentId"] = p.instrument->instrument_id;
  d["weighted"] = p.weighted;
  d["itemCount"] = items.size();
  add(p, 0, ev::kCue, std::move(d));
  p.content_ms = static_cast<std::int64_t>(items.size()) * kQuestionnaireItemMs;
}

void plan_break(StepPlan& p) {
  if (p.settings.break_.duration_ms <= 0) throw Error(Errc::invalid_argument, "break duration must be positive");
  Json d = base_details(p, "break", 0);
  d["durationMs"] = p.settings.break_.duration_ms;
  add(p, 0, ev::kCue, std::move(d));
  p.content_ms = p.settings.break_.duration_ms;
}

}  // namespace

StepPlan plan_step(const protocol::ExperimentFlow& flow, std::size_t index, const tasks::MediaStore* store) {
  if (index >= flow.steps.size()) throw Error(Errc::out_of_range, "step index out of range");
  const auto& step = flow.steps[index];
  StepPlan p;
  p.step_index = index;
  p.step_id = step.step_id;
  p.task_type = step.task_type;
  p.task_name = std::string(protocol::task_name(step.task_type));
  p.instance_index = protocol::instance_index(flow, index);
  p.seed = step.seed.value_or(0);
  p.settings = protocol::resolve_step_settings(flow, index);
  if (protocol::carries_markers(step.task_type)) {
    p.markers = markers::allocate_task_markers(step.task_type, p.instance_index);
    if (p.settings.markers.display_ms <= 0) throw Error(Errc::invalid_argument, "marker display must be positive");
    p.lead_ms = p.tail_ms = p.settings.markers.display_ms;
  }

  using trajectory::FixationMode;
  using trajectory::PursuitMode;
  switch (step.task_type) {
    case TaskType::FixationHorizontal: plan_fixation(p, FixationMode::Horizontal); break;
    case TaskType::FixationVertical: plan_fixation(p, FixationMode::Vertical); break;
    case TaskType::FixationRandom: plan_fixation(p, FixationMode::Random); break;
    case TaskType::PursuitConstant: plan_pursuit(p, PursuitMode::Constant); break;
    case TaskType::PursuitAccelerating: plan_pursuit(p, PursuitMode::Accelerating); break;
    case TaskType::PursuitRandom: plan_pursuit(p, PursuitMode::Random); break;
    case TaskType::PursuitCircular: plan_pursuit(p, PursuitMode::Circular); break;
    case TaskType::PursuitWandering: plan_pursuit(p, PursuitMode::Wandering); break;
    case TaskType::NBackLetter: plan_nback(p, tasks::NBackModality::Letter); break;
    case TaskType::NBackShape: plan_nback(p, tasks::NBackModality::Shape); break;
    case TaskType::NBackSound: plan_nback(p, tasks::NBackModality::Sound); break;
    case TaskType::StroopSimple: plan_stroop(p, tasks::StroopVariant::Simple); break;
    case TaskType::StroopComplex: plan_stroop(p, tasks::StroopVariant::Complex); break;
    case TaskType::StroopFast: plan_stroop(p, tasks::StroopVariant::Fast); break;
    case TaskType::ArrowEasy: plan_arrow(p, tasks::ArrowLevel::Easy); break;
    case TaskType::ArrowMedium: plan_arrow(p, tasks::ArrowLevel::Medium); break;
    case TaskType::ArrowHard: plan_arrow(p, tasks::ArrowLevel::Hard); break;
    case TaskType::BlinkLong: plan_blink(p, tasks::BlinkVariant::Long); break;
    case TaskType::BlinkShort: plan_blink(p, tasks::BlinkVariant::Short); break;
    case TaskType::Slippage: plan_slippage(p); break;
    case TaskType::ContentText: plan_content(p, tasks::ContentKind::Text, store); break;
    case TaskType::ContentImage: plan_content(p, tasks::ContentKind::Image, store); break;
    case TaskType::ContentVideo: plan_content(p, tasks::ContentKind::Video, store); break;
    case TaskType::Vergence: plan_vergence(p); break;
    case TaskType::Calibration1: plan_calibration(p, 1); break;
    case TaskType::Calibration3: plan_calibration(p, 3); break;
    case TaskType::Calibration5: plan_calibration(p, 5); break;
    case TaskType::Calibration9: plan_calibration(p, 9); break;
    case TaskType::Validation: plan_calibration(p, 0); break;
    case TaskType::QuestionnaireDemographics:
    case TaskType::QuestionnaireNasaTlx:
    case TaskType::QuestionnaireBfi10:
    case TaskType::QuestionnaireCustom: plan_questionnaire(p); break;
    case TaskType::Break: plan_break(p); break;
  }
  return p;
}

trajectory::PursuitMode pursuit_mode_of(TaskType type) {
  if (protocol::family_of(type) != TaskFamily::Pursuit) {
    throw Error(Errc::invalid_argument, std::string(protocol::to_string(type)) + " is not a pursuit task");
  }
  static constexpr trajectory::PursuitMode kModes[] = {
      trajectory::PursuitMode::Constant, trajectory::PursuitMode::Accelerating, trajectory::PursuitMode::Random,
      trajectory::PursuitMode::Circular, trajectory::PursuitMode::Wandering};
  return kModes[static_cast<int>(type) - static_cast<int>(TaskType::PursuitConstant)];
}

Json pursuit_vectors(const StepPlan& p, double rate_hz) {
  if (!(rate_hz > 0)) throw Error(Errc::invalid_argument, "sampling rate must be positive");
  const trajectory::PursuitTrajectory traj(trajectory::pursuit_params(p.settings, pursuit_mode_of(p.task_type), p.seed),
                                           p.settings);
  Json samples = Json::array();
  const auto n = static_cast<std::int64_t>(std::floor(traj.duration_ms() * rate_hz / 1000.0 + 1e-9));
  for (std::int64_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * 1000.0 / rate_hz;
    const auto s = traj.at(t);
    const char* state = s.state == trajectory::PursuitState::Moving   ? "moving"
                        : s.state == trajectory::PursuitState::Paused ? "paused"
                                                                      : "done";
    samples.push_back({{"tMs", t}, {"xPx", s.x_px}, {"yPx", s.y_px}, {"state", state}, {"trip", s.trip}});
  }
  return {{"stepId", p.step_id}, {"taskType", protocol::to_string(p.task_type)}, {"seed", p.seed},
          {"rateHz", rate_hz}, {"settings", protocol::to_json(p.settings)}, {"samples", std::move(samples)}};
}

std::vector<StepPlan> plan_session(const protocol::ExperimentFlow& flow, const tasks::MediaStore* store) {
  std::vector<StepPlan> out;
  out.reserve(flow.steps.size());
  for (std::size_t i = 0; i < flow.steps.size(); ++i) out.push_back(plan_step(flow, i, store));
  return out;
}

Json to_json(const StepPlan& p) {
  Json stimuli = Json::array();
  for (const auto& s : p.stimuli) {
    stimuli.push_back({{"offsetMs", s.offset_ms}, {"eventType", s.event_type}, {"details", s.details}});
  }
  Json j{{"stepIndex", p.step_index},
         {"stepId", p.step_id},
         {"taskType", protocol::to_string(p.task_type)},
         {"taskName", p.task_name},
         {"instanceIndex", p.instance_index},
         {"seed", p.seed},
         {"leadMs", p.lead_ms},
         {"contentMs", p.content_ms},
         {"tailMs", p.tail_ms},
         {"settings", protocol::to_json(p.settings)},
         {"stimuli", std::move(stimuli)}};
  j["markers"] = p.markers ? Json{{"start", p.markers->start_id}, {"end", p.markers->end_id}} : Json(nullptr);
  if (protocol::family_of(p.task_type) == TaskFamily::Pursuit) {
    const auto mode = pursuit_mode_of(p.task_type);
    const trajectory::PursuitTrajectory traj(trajectory::pursuit_params(p.settings, mode, p.seed), p.settings);
    Json trips = Json::array();
    for (const auto& t : traj.trips()) {
      trips.push_back({{"startMs", t.start_ms}, {"durationMs", t.duration_ms}, {"fromX", t.from_x}, {"fromY", t.from_y},
                       {"dirX", t.dir_x}, {"dirY", t.dir_y}, {"vPxMs", t.v_px_ms}, {"aPxMs2", t.a_px_ms2}});
    }
    j["trajectory"] = {{"mode", trajectory::to_string(mode)}, {"durationMs", traj.duration_ms()},
                       {"pxPerDeg", traj.px_per_deg()}, {"trips", std::move(trips)}};
  }
  return j;
}

}  // namespace stimforge::engine

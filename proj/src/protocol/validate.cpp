#include "stimforge/protocol/validate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stimforge/common/error.hpp"
#include "stimforge/engine/plan.hpp"
#include "stimforge/markers/ids.hpp"
#include "stimforge/trajectory/geometry.hpp"

namespace stimforge::protocol {
namespace {

class Checker {
 public:
  explicit Checker(std::vector<ValidationIssue>& out) : out_(out) {}

  void error(std::string field, std::string message) {
    out_.push_back({std::nullopt, std::move(field), Severity::Error, std::move(message)});
  }
  void positive(const std::string& field, double v) {
    if (!(v > 0)) error(field, field + " must be positive");
  }
  void non_negative(const std::string& field, double v) {
    if (!(v >= 0)) error(field, field + " must not be negative");
  }
  void unit(const std::string& field, double v) {
    if (!(v >= 0 && v <= 1)) error(field, field + " must lie in [0, 1]");
  }
  void grid(const std::string& field, int v) {
    if (v > 20) error(field, field + " exceeds 20");
    else if (v < 1) error(field, field + " must be at least 1");
  }
  void at_least(const std::string& field, double v, double lo, const std::string& lo_name) {
    if (!(v >= lo)) error(field, field + " must not be below " + lo_name);
  }

 private:
  std::vector<ValidationIssue>& out_;
};

bool is_fixation_with_e(const FlowStep& step, const SettingsPreset& s) {
  return family_of(step.task_type) == TaskFamily::Fixation && s.fixation.stimulus_mode == StimulusMode::E;
}

}  // namespace

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(), [](const auto& i) { return i.severity == Severity::Error; });
}

Json to_json(const ValidationReport& r) {
  Json issues = Json::array();
  for (const auto& i : r.issues) {
    Json j{{"field", i.field}, {"severity", to_string(i.severity)}, {"message", i.message}};
    j["step_id"] = i.step_id ? Json(*i.step_id) : Json(nullptr);
    issues.push_back(std::move(j));
  }
  return {{"ok", r.ok()}, {"issues", std::move(issues)}};
}

std::vector<ValidationIssue> validate_preset(const SettingsPreset& s) {
  std::vector<ValidationIssue> out;
  Checker c(out);
  c.positive("fixation_dot_size_deg", s.fixation_dot_size_deg);
  for (double v : s.dot_color_rgba) {
    if (!(v >= 0 && v <= 1)) {
      c.error("dot_color_rgba", "dot_color_rgba components must lie in [0, 1]");
      break;
    }
  }
  c.grid("grid_rows", s.grid_rows);
  c.grid("grid_cols", s.grid_cols);
  c.positive("display_duration_ms", s.display_duration_ms);
  c.non_negative("pause_duration_ms", s.pause_duration_ms);
  c.positive("screen_width_cm", s.screen_width_cm);
  c.positive("screen_height_cm", s.screen_height_cm);
  c.positive("viewing_distance_cm", s.viewing_distance_cm);
  c.positive("viewport_width_px", s.viewport_width_px);
  c.positive("viewport_height_px", s.viewport_height_px);

  const auto& t = s.target;
  c.positive("target.point_diameter_deg", t.point_diameter_deg);
  c.positive("target.gaussian_sigma_deg", t.gaussian_sigma_deg);
  c.positive("target.ccp_outer_diameter_deg", t.ccp_outer_diameter_deg);
  c.positive("target.ccp_cross_width_deg", t.ccp_cross_width_deg);
  c.positive("target.ccp_center_dot_deg", t.ccp_center_dot_deg);
  c.positive("target.bessel_cycles_per_deg", t.bessel_cycles_per_deg);
  c.unit("target.opacity", t.opacity);

  c.positive("fixation.shrink_start_deg", s.fixation.shrink_start_deg);
  c.positive("fixation.shrink_end_deg", s.fixation.shrink_end_deg);
  if (s.fixation.shrink_end_deg > s.fixation.shrink_start_deg) {
    c.error("fixation.shrink_end_deg", "fixation.shrink_end_deg exceeds fixation.shrink_start_deg");
  }

  const auto& p = s.pursuit;
  c.positive("pursuit.velocity_deg_s", p.velocity_deg_s);
  c.non_negative("pursuit.velocity_increment_deg_s", p.velocity_increment_deg_s);
  if (p.trips < 1) c.error("pursuit.trips", "pursuit.trips must be at least 1");
  c.non_negative("pursuit.pause_ms", p.pause_ms);
  if (!std::isfinite(p.direction_deg)) c.error("pursuit.direction_deg", "pursuit.direction_deg must be finite");
  c.positive("pursuit.random_velocity_min_deg_s", p.random_velocity_min_deg_s);
  c.at_least("pursuit.random_velocity_max_deg_s", p.random_velocity_max_deg_s, p.random_velocity_min_deg_s,
             "pursuit.random_velocity_min_deg_s");
  c.non_negative("pursuit.random_accel_min_deg_s2", p.random_accel_min_deg_s2);
  c.at_least("pursuit.random_accel_max_deg_s2", p.random_accel_max_deg_s2, p.random_accel_min_deg_s2,
             "pursuit.random_accel_min_deg_s2");
  c.positive("pursuit.circular_radius_x_deg", p.circular_radius_x_deg);
  c.positive("pursuit.circular_radius_y_deg", p.circular_radius_y_deg);
  c.positive("pursuit.circular_period_ms", p.circular_period_ms);
  c.positive("pursuit.wander_duration_ms", p.wander_duration_ms);
  c.non_negative("pursuit.wander_heading_sigma_deg", p.wander_heading_sigma_deg);
  c.non_negative("pursuit.wander_margin_deg", p.wander_margin_deg);
  c.positive("pursuit.sample_interval_ms", p.sample_interval_ms);

  const auto& g = s.cognitive;
  if (g.nback_n < 1) c.error("cognitive.nback_n", "cognitive.nback_n must be at least 1");
  if (g.nback_trials <= g.nback_n) c.error("cognitive.nback_trials", "cognitive.nback_trials must exceed cognitive.nback_n");
  if (!(g.nback_target_rate > 0 && g.nback_target_rate <= 1)) {
    c.error("cognitive.nback_target_rate", "cognitive.nback_target_rate must lie in (0, 1]");
  }
  c.positive("cognitive.stimulus_ms", g.stimulus_ms);
  c.non_negative("cognitive.inter_stimulus_ms", g.inter_stimulus_ms);
  if (g.stroop_trials < 1) c.error("cognitive.stroop_trials", "cognitive.stroop_trials must be at least 1");
  c.unit("cognitive.stroop_incongruent_ratio", g.stroop_incongruent_ratio);
  if (!(g.stroop_fast_window_factor > 0 && g.stroop_fast_window_factor < 1)) {
    c.error("cognitive.stroop_fast_window_factor", "cognitive.stroop_fast_window_factor must lie in (0, 1)");
  }
  if (g.arrow_moves < 1) c.error("cognitive.arrow_moves", "cognitive.arrow_moves must be at least 1");
  c.positive("cognitive.arrow_cell_ms", g.arrow_cell_ms);

  c.positive("blink.long_interval_ms", s.blink.long_interval_ms);
  c.positive("blink.short_interval_ms", s.blink.short_interval_ms);
  if (s.blink.cue_count < 1) c.error("blink.cue_count", "blink.cue_count must be at least 1");

  c.positive("slippage.step_duration_ms", s.slippage.step_duration_ms);
  c.grid("slippage.grid_rows", s.slippage.grid_rows);
  c.grid("slippage.grid_cols", s.slippage.grid_cols);

  c.positive("content.duration_ms", s.content.duration_ms);

  const auto& v = s.vergence;
  if (v.depths_cm.empty()) c.error("vergence.depths_cm", "vergence.depths_cm must not be empty");
  for (double d : v.depths_cm) {
    if (!(d > 0)) {
      c.error("vergence.depths_cm", "vergence.depths_cm entries must be positive");
      break;
    }
  }
  if (v.marker_mode && static_cast<int>(v.depths_cm.size()) > markers::kMaxVergenceDepths) {
    c.error("vergence.depths_cm", "vergence.depths_cm has more depths than marker slots (" +
                                      std::to_string(markers::kMaxVergenceDepths) + ")");
  }
  c.positive("vergence.dwell_ms", v.dwell_ms);

  c.positive("calibration.point_duration_ms", s.calibration.point_duration_ms);
  c.non_negative("calibration.pause_ms", s.calibration.pause_ms);
  c.positive("markers.size_px", s.markers.size_px);
  c.positive("markers.display_ms", s.markers.display_ms);
  c.positive("break.duration_ms", s.break_.duration_ms);

  if (out.empty()) {
    try {
      (void)trajectory::display_geometry(s);
    } catch (const Error& e) {
      c.error("viewport_width_px", e.what());
    }
  }
  return out;
}

bool override_key_allowed(TaskType type, std::string_view key) {
  static const std::set<std::string_view, std::less<>> common{"fixationDotType", "fixationDotSize",
                                                               "fixationDotPolarity", "dotColor", "target", "markers"};
  if (common.contains(key)) return true;
  switch (family_of(type)) {
    case TaskFamily::Fixation:
      return key == "gridRows" || key == "gridCols" || key == "displayDuration" || key == "pauseDuration" ||
             key == "fixation";
    case TaskFamily::Pursuit: return key == "pursuit";
    case TaskFamily::NBack:
    case TaskFamily::Stroop:
    case TaskFamily::Arrow: return key == "cognitive";
    case TaskFamily::Blink: return key == "blink";
    case TaskFamily::Slippage: return key == "slippage" || key == "displayDuration" || key == "pauseDuration";
    case TaskFamily::Content: return key == "content";
    case TaskFamily::Vergence: return key == "vergence";
    case TaskFamily::Calibration: return key == "calibration";
    case TaskFamily::Questionnaire: return key == "questionnaire";
    case TaskFamily::Break: return key == "break";
  }
  return false;
}

ValidationReport validate_flow(const ExperimentFlow& flow, const tasks::MediaStore* store) {
  ValidationReport report;
  auto& issues = report.issues;
  if (flow.steps.empty()) issues.push_back({std::nullopt, "steps", Severity::Error, "flow has no steps"});

  const auto global = validate_preset(flow.global_preset);
  issues.insert(issues.end(), global.begin(), global.end());
  std::set<std::pair<std::string, std::string>> global_keys;
  for (const auto& i : global) global_keys.emplace(i.field, i.message);

  std::set<std::string> ids;
  for (std::size_t idx = 0; idx < flow.steps.size(); ++idx) {
    const auto& step = flow.steps[idx];
    const auto before = issues.size();
    auto err = [&](std::string field, std::string message, Severity sev = Severity::Error) {
      issues.push_back({step.step_id, std::move(field), sev, std::move(message)});
    };
    if (step.step_id.empty()) err("step_id", "step_id must not be empty");
    else if (!ids.insert(step.step_id).second) err("step_id", "duplicate step_id '" + step.step_id + "'");

    for (const auto& [key, _] : step.overrides.items()) {
      if (!override_key_allowed(step.task_type, key)) {
        err("overrides." + key, std::string(task_name(step.task_type)) + " steps cannot override " + key);
      }
    }

    SettingsPreset settings;
    try {
      settings = resolve_step_settings(flow, idx);
    } catch (const Error& e) {
      err("overrides", e.what());
      continue;
    }
    for (auto& i : validate_preset(settings)) {
      if (global_keys.contains({i.field, i.message})) continue;
      i.step_id = step.step_id;
      issues.push_back(std::move(i));
    }

    const bool needs_seed = is_stochastic(step.task_type) || is_fixation_with_e(step, settings);
    if (needs_seed && !step.seed) err("seed", std::string(task_name(step.task_type)) + " needs an explicit seed");
    if (!needs_seed && step.seed) err("seed", "seed is unused by " + std::string(task_name(step.task_type)), Severity::Warning);

    if (carries_markers(step.task_type) && instance_index(flow, idx) >= markers::kInstancesPerTaskType) {
      err("task_type", "more than " + std::to_string(markers::kInstancesPerTaskType) + " " +
                           std::string(task_name(step.task_type)) + " steps exhaust its marker IDs");
    }

    const bool step_has_errors = std::any_of(issues.begin() + static_cast<std::ptrdiff_t>(before), issues.end(),
                                             [](const auto& i) { return i.severity == Severity::Error; });
    if (step_has_errors || !global.empty()) continue;
    // Dry run: whatever the generators reject is a violation too.
    try {
      (void)engine::plan_step(flow, idx, store);
    } catch (const Error& e) {
      std::string field = "plan";
      if (e.code() == Errc::unknown_media) field = "content.media_ref";
      err(field, e.what());
    }
  }
  return report;
}

}  // namespace stimforge::protocol

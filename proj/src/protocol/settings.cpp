#include "stimforge/protocol/settings.hpp"

#include <algorithm>

namespace stimforge::protocol {
namespace {

template <typename E, std::size_t N>
E enum_from(const std::array<E, N>& values, const std::string& text, const std::string& where) {
  for (E v : values) {
    if (to_string(v) == text) return v;
  }
  throw Error(Errc::parse_error, where + ": unknown value '" + text + "'");
}

constexpr std::array kDotTypes{DotType::Point, DotType::Circle, DotType::Gaussian, DotType::CCP,
                               DotType::Bessel};
constexpr std::array kPolarities{Polarity::DarkOnGray, Polarity::LightOnDark};
constexpr std::array kModes{StimulusMode::Dot, StimulusMode::E, StimulusMode::Shrinking};
constexpr std::array kRotations{Rotation::Clockwise, Rotation::CounterClockwise};

constexpr std::array<std::string_view, 25> kKeys{
    "fixationDotType", "fixationDotSize", "fixationDotPolarity", "dotColor",
    "gridRows",        "gridCols",        "displayDuration",     "pauseDuration",
    "screenWidthCm",   "screenHeightCm",  "viewingDistanceCm",   "viewportWidthPx",
    "viewportHeightPx", "target",         "fixation",            "pursuit",
    "cognitive",       "blink",           "slippage",            "content",
    "vergence",        "calibration",     "markers",             "break",
    "questionnaire"};

Json target_json(const TargetSettings& t) {
  return {{"pointDiameterDeg", t.point_diameter_deg},
          {"gaussianSigmaDeg", t.gaussian_sigma_deg},
          {"ccpOuterDiameterDeg", t.ccp_outer_diameter_deg},
          {"ccpCrossWidthDeg", t.ccp_cross_width_deg},
          {"ccpCenterDotDeg", t.ccp_center_dot_deg},
          {"besselCyclesPerDeg", t.bessel_cycles_per_deg},
          {"opacity", t.opacity}};
}

TargetSettings target_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  TargetSettings d;
  TargetSettings t;
  t.point_diameter_deg = r.get_or("pointDiameterDeg", d.point_diameter_deg);
  t.gaussian_sigma_deg = r.get_or("gaussianSigmaDeg", d.gaussian_sigma_deg);
  t.ccp_outer_diameter_deg = r.get_or("ccpOuterDiameterDeg", d.ccp_outer_diameter_deg);
  t.ccp_cross_width_deg = r.get_or("ccpCrossWidthDeg", d.ccp_cross_width_deg);
  t.ccp_center_dot_deg = r.get_or("ccpCenterDotDeg", d.ccp_center_dot_deg);
  t.bessel_cycles_per_deg = r.get_or("besselCyclesPerDeg", d.bessel_cycles_per_deg);
  t.opacity = r.get_or("opacity", d.opacity);
  r.finish();
  return t;
}

Json fixation_json(const FixationSettings& f) {
  return {{"stimulusMode", to_string(f.stimulus_mode)},
          {"shrinkStartDeg", f.shrink_start_deg},
          {"shrinkEndDeg", f.shrink_end_deg}};
}

FixationSettings fixation_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  FixationSettings f;
  if (r.has("stimulusMode")) {
    f.stimulus_mode = enum_from(kModes, r.get<std::string>("stimulusMode"), path + ".stimulusMode");
  }
  f.shrink_start_deg = r.get_or("shrinkStartDeg", f.shrink_start_deg);
  f.shrink_end_deg = r.get_or("shrinkEndDeg", f.shrink_end_deg);
  r.finish();
  return f;
}

Json pursuit_json(const PursuitSettings& p) {
  return {{"velocityDegS", p.velocity_deg_s},
          {"velocityIncrementDegS", p.velocity_increment_deg_s},
          {"trips", p.trips},
          {"pauseMs", p.pause_ms},
          {"directionDeg", p.direction_deg},
          {"randomVelocityMinDegS", p.random_velocity_min_deg_s},
          {"randomVelocityMaxDegS", p.random_velocity_max_deg_s},
          {"randomAccelMinDegS2", p.random_accel_min_deg_s2},
          {"randomAccelMaxDegS2", p.random_accel_max_deg_s2},
          {"circularRadiusXDeg", p.circular_radius_x_deg},
          {"circularRadiusYDeg", p.circular_radius_y_deg},
          {"circularPeriodMs", p.circular_period_ms},
          {"circularDirection", to_string(p.circular_direction)},
          {"wanderDurationMs", p.wander_duration_ms},
          {"wanderHeadingSigmaDeg", p.wander_heading_sigma_deg},
          {"wanderMarginDeg", p.wander_margin_deg},
          {"sampleIntervalMs", p.sample_interval_ms}};
}

PursuitSettings pursuit_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  PursuitSettings p;
  p.velocity_deg_s = r.get_or("velocityDegS", p.velocity_deg_s);
  p.velocity_increment_deg_s = r.get_or("velocityIncrementDegS", p.velocity_increment_deg_s);
  p.trips = r.get_or("trips", p.trips);
  p.pause_ms = r.get_or("pauseMs", p.pause_ms);
  p.direction_deg = r.get_or("directionDeg", p.direction_deg);
  p.random_velocity_min_deg_s = r.get_or("randomVelocityMinDegS", p.random_velocity_min_deg_s);
  p.random_velocity_max_deg_s = r.get_or("randomVelocityMaxDegS", p.random_velocity_max_deg_s);
  p.random_accel_min_deg_s2 = r.get_or("randomAccelMinDegS2", p.random_accel_min_deg_s2);
  p.random_accel_max_deg_s2 = r.get_or("randomAccelMaxDegS2", p.random_accel_max_deg_s2);
  p.circular_radius_x_deg = r.get_or("circularRadiusXDeg", p.circular_radius_x_deg);
  p.circular_radius_y_deg = r.get_or("circularRadiusYDeg", p.circular_radius_y_deg);
  p.circular_period_ms = r.get_or("circularPeriodMs", p.circular_period_ms);
  if (r.has("circularDirection")) {
    p.circular_direction =
        enum_from(kRotations, r.get<std::string>("circularDirection"), path + ".circularDirection");
  }
  p.wander_duration_ms = r.get_or("wanderDurationMs", p.wander_duration_ms);
  p.wander_heading_sigma_deg = r.get_or("wanderHeadingSigmaDeg", p.wander_heading_sigma_deg);
  p.wander_margin_deg = r.get_or("wanderMarginDeg", p.wander_margin_deg);
  p.sample_interval_ms = r.get_or("sampleIntervalMs", p.sample_interval_ms);
  r.finish();
  return p;
}

Json cognitive_json(const CognitiveSettings& c) {
  return {{"nbackN", c.nback_n},
          {"nbackTrials", c.nback_trials},
          {"nbackTargetRate", c.nback_target_rate},
          {"stimulusMs", c.stimulus_ms},
          {"interStimulusMs", c.inter_stimulus_ms},
          {"stroopTrials", c.stroop_trials},
          {"stroopIncongruentRatio", c.stroop_incongruent_ratio},
          {"stroopFastWindowFactor", c.stroop_fast_window_factor},
          {"arrowMoves", c.arrow_moves},
          {"arrowCellMs", c.arrow_cell_ms}};
}

CognitiveSettings cognitive_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  CognitiveSettings c;
  c.nback_n = r.get_or("nbackN", c.nback_n);
  c.nback_trials = r.get_or("nbackTrials", c.nback_trials);
  c.nback_target_rate = r.get_or("nbackTargetRate", c.nback_target_rate);
  c.stimulus_ms = r.get_or("stimulusMs", c.stimulus_ms);
  c.inter_stimulus_ms = r.get_or("interStimulusMs", c.inter_stimulus_ms);
  c.stroop_trials = r.get_or("stroopTrials", c.stroop_trials);
  c.stroop_incongruent_ratio = r.get_or("stroopIncongruentRatio", c.stroop_incongruent_ratio);
  c.stroop_fast_window_factor = r.get_or("stroopFastWindowFactor", c.stroop_fast_window_factor);
  c.arrow_moves = r.get_or("arrowMoves", c.arrow_moves);
  c.arrow_cell_ms = r.get_or("arrowCellMs", c.arrow_cell_ms);
  r.finish();
  return c;
}

Json blink_json(const BlinkSettings& b) {
  return {{"longIntervalMs", b.long_interval_ms},
          {"shortIntervalMs", b.short_interval_ms},
          {"cueCount", b.cue_count}};
}

BlinkSettings blink_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  BlinkSettings b;
  b.long_interval_ms = r.get_or("longIntervalMs", b.long_interval_ms);
  b.short_interval_ms = r.get_or("shortIntervalMs", b.short_interval_ms);
  b.cue_count = r.get_or("cueCount", b.cue_count);
  r.finish();
  return b;
}

Json slippage_json(const SlippageSettings& s) {
  return {{"stepDurationMs", s.step_duration_ms}, {"gridRows", s.grid_rows}, {"gridCols", s.grid_cols}};
}

SlippageSettings slippage_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  SlippageSettings s;
  s.step_duration_ms = r.get_or("stepDurationMs", s.step_duration_ms);
  s.grid_rows = r.get_or("gridRows", s.grid_rows);
  s.grid_cols = r.get_or("gridCols", s.grid_cols);
  r.finish();
  return s;
}

Json content_json(const ContentSettings& c) {
  return {{"mediaRef", c.media_ref}, {"durationMs", c.duration_ms}};
}

ContentSettings content_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  ContentSettings c;
  c.media_ref = r.get_or("mediaRef", c.media_ref);
  c.duration_ms = r.get_or("durationMs", c.duration_ms);
  r.finish();
  return c;
}

Json vergence_json(const VergenceSettings& v) {
  return {{"depthsCm", v.depths_cm}, {"dwellMs", v.dwell_ms}, {"markerMode", v.marker_mode}};
}

VergenceSettings vergence_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  VergenceSettings v;
  if (r.has("depthsCm")) {
    const Json& d = r.at("depthsCm");
    if (!d.is_array() || !std::all_of(d.begin(), d.end(), [](const Json& x) { return x.is_number(); })) {
      throw Error(Errc::parse_error, path + ".depthsCm: expected an array of numbers");
    }
    v.depths_cm = d.get<std::vector<double>>();
  }
  v.dwell_ms = r.get_or("dwellMs", v.dwell_ms);
  v.marker_mode = r.get_or("markerMode", v.marker_mode);
  r.finish();
  return v;
}

Json calibration_json(const CalibrationSettings& c) {
  return {{"pointDurationMs", c.point_duration_ms}, {"pauseMs", c.pause_ms}};
}

CalibrationSettings calibration_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  CalibrationSettings c;
  c.point_duration_ms = r.get_or("pointDurationMs", c.point_duration_ms);
  c.pause_ms = r.get_or("pauseMs", c.pause_ms);
  r.finish();
  return c;
}

Json markers_json(const MarkerSettings& m) {
  return {{"sizePx", m.size_px}, {"displayMs", m.display_ms}, {"showEdgeMarkers", m.show_edge_markers}};
}

MarkerSettings markers_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  MarkerSettings m;
  m.size_px = r.get_or("sizePx", m.size_px);
  m.display_ms = r.get_or("displayMs", m.display_ms);
  m.show_edge_markers = r.get_or("showEdgeMarkers", m.show_edge_markers);
  r.finish();
  return m;
}

Json break_json(const BreakSettings& b) { return {{"durationMs", b.duration_ms}}; }

BreakSettings break_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  BreakSettings b;
  b.duration_ms = r.get_or("durationMs", b.duration_ms);
  r.finish();
  return b;
}

Json questionnaire_json(const QuestionnaireSettings& q) {
  return {{"nasaTlxWeighted", q.nasa_tlx_weighted}, {"customInstrument", q.custom_instrument}};
}

QuestionnaireSettings questionnaire_from(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  QuestionnaireSettings q;
  q.nasa_tlx_weighted = r.get_or("nasaTlxWeighted", q.nasa_tlx_weighted);
  if (r.has("customInstrument")) {
    const Json& ci = r.at("customInstrument");
    if (!ci.is_null() && !ci.is_object()) {
      throw Error(Errc::parse_error, path + ".customInstrument: expected an object or null");
    }
    q.custom_instrument = ci;
  }
  r.finish();
  return q;
}

}  // namespace

std::string_view to_string(DotType v) {
  switch (v) {
    case DotType::Point: return "Point";
    case DotType::Circle: return "Circle";
    case DotType::Gaussian: return "Gaussian";
    case DotType::CCP: return "CCP";
    case DotType::Bessel: return "Bessel";
  }
  return "Circle";
}

std::string_view to_string(Polarity v) {
  return v == Polarity::DarkOnGray ? "dark-on-gray" : "light-on-dark";
}

std::string_view to_string(StimulusMode v) {
  switch (v) {
    case StimulusMode::Dot: return "dot";
    case StimulusMode::E: return "E";
    case StimulusMode::Shrinking: return "shrinking";
  }
  return "dot";
}

std::string_view to_string(Rotation v) { return v == Rotation::Clockwise ? "cw" : "ccw"; }

std::span<const std::string_view> settings_keys() { return kKeys; }

Json to_json(const SettingsPreset& s) {
  Json j;
  j["fixationDotType"] = to_string(s.fixation_dot_type);
  j["fixationDotSize"] = s.fixation_dot_size_deg;
  j["fixationDotPolarity"] = to_string(s.polarity);
  j["dotColor"] = s.dot_color_rgba;
  j["gridRows"] = s.grid_rows;
  j["gridCols"] = s.grid_cols;
  j["displayDuration"] = s.display_duration_ms;
  j["pauseDuration"] = s.pause_duration_ms;
  j["screenWidthCm"] = s.screen_width_cm;
  j["screenHeightCm"] = s.screen_height_cm;
  j["viewingDistanceCm"] = s.viewing_distance_cm;
  j["viewportWidthPx"] = s.viewport_width_px;
  j["viewportHeightPx"] = s.viewport_height_px;
  j["target"] = target_json(s.target);
  j["fixation"] = fixation_json(s.fixation);
  j["pursuit"] = pursuit_json(s.pursuit);
  j["cognitive"] = cognitive_json(s.cognitive);
  j["blink"] = blink_json(s.blink);
  j["slippage"] = slippage_json(s.slippage);
  j["content"] = content_json(s.content);
  j["vergence"] = vergence_json(s.vergence);
  j["calibration"] = calibration_json(s.calibration);
  j["markers"] = markers_json(s.markers);
  j["break"] = break_json(s.break_);
  j["questionnaire"] = questionnaire_json(s.questionnaire);
  return j;
}

SettingsPreset settings_from_json(const Json& j, const std::string& path) {
  ObjectReader r(j, path);
  SettingsPreset s;
  if (r.has("fixationDotType")) {
    s.fixation_dot_type =
        enum_from(kDotTypes, r.get<std::string>("fixationDotType"), path + ".fixationDotType");
  }
  s.fixation_dot_size_deg = r.get_or("fixationDotSize", s.fixation_dot_size_deg);
  if (r.has("fixationDotPolarity")) {
    s.polarity =
        enum_from(kPolarities, r.get<std::string>("fixationDotPolarity"), path + ".fixationDotPolarity");
  }
  if (r.has("dotColor")) {
    const Json& c = r.at("dotColor");
    if (!c.is_array() || c.size() != 4 ||
        !std::all_of(c.begin(), c.end(), [](const Json& v) { return v.is_number(); })) {
      throw Error(Errc::parse_error, path + ".dotColor: expected 4 numbers (RGBA)");
    }
    for (std::size_t i = 0; i < 4; ++i) s.dot_color_rgba[i] = c[i].get<double>();
  }
  s.grid_rows = r.get_or("gridRows", s.grid_rows);
  s.grid_cols = r.get_or("gridCols", s.grid_cols);
  s.display_duration_ms = r.get_or("displayDuration", s.display_duration_ms);
  s.pause_duration_ms = r.get_or("pauseDuration", s.pause_duration_ms);
  s.screen_width_cm = r.get_or("screenWidthCm", s.screen_width_cm);
  s.screen_height_cm = r.get_or("screenHeightCm", s.screen_height_cm);
  s.viewing_distance_cm = r.get_or("viewingDistanceCm", s.viewing_distance_cm);
  s.viewport_width_px = r.get_or("viewportWidthPx", s.viewport_width_px);
  s.viewport_height_px = r.get_or("viewportHeightPx", s.viewport_height_px);
  if (r.has("target")) s.target = target_from(r.at("target"), path + ".target");
  if (r.has("fixation")) s.fixation = fixation_from(r.at("fixation"), path + ".fixation");
  if (r.has("pursuit")) s.pursuit = pursuit_from(r.at("pursuit"), path + ".pursuit");
  if (r.has("cognitive")) s.cognitive = cognitive_from(r.at("cognitive"), path + ".cognitive");
  if (r.has("blink")) s.blink = blink_from(r.at("blink"), path + ".blink");
  if (r.has("slippage")) s.slippage = slippage_from(r.at("slippage"), path + ".slippage");
  if (r.has("content")) s.content = content_from(r.at("content"), path + ".content");
  if (r.has("vergence")) s.vergence = vergence_from(r.at("vergence"), path + ".vergence");
  if (r.has("calibration")) s.calibration = calibration_from(r.at("calibration"), path + ".calibration");
  if (r.has("markers")) s.markers = markers_from(r.at("markers"), path + ".markers");
  if (r.has("break")) s.break_ = break_from(r.at("break"), path + ".break");
  if (r.has("questionnaire")) {
    s.questionnaire = questionnaire_from(r.at("questionnaire"), path + ".questionnaire");
  }
  r.finish();
  return s;
}

std::string serialize_preset(const PresetDocument& doc) {
  Json j{{"schema_version", kPresetSchemaVersion}, {"name", doc.name}, {"settings", to_json(doc.settings)}};
  return j.dump(2) + "\n";
}

PresetDocument parse_preset(std::string_view text) {
  const Json j = parse_json(text);
  ObjectReader r(j, "preset");
  const auto version = r.get<std::string>("schema_version");
  if (version != kPresetSchemaVersion) {
    throw Error(Errc::version_error, "preset: unsupported schema_version '" + version + "'");
  }
  PresetDocument doc;
  doc.name = r.get_or<std::string>("name", "");
  doc.settings = settings_from_json(r.at("settings"), "preset.settings");
  r.finish();
  return doc;
}

}  // namespace stimforge::protocol

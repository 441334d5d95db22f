#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stimforge/common/json.hpp"

namespace stimforge::protocol {

enum class DotType { Point, Circle, Gaussian, CCP, Bessel };
enum class Polarity { DarkOnGray, LightOnDark };
enum class StimulusMode { Dot, E, Shrinking };
enum class Rotation { Clockwise, CounterClockwise };

std::string_view to_string(DotType v);
std::string_view to_string(Polarity v);
std::string_view to_string(StimulusMode v);
std::string_view to_string(Rotation v);

/// Appearance parameters of the five fixation target profiles.
struct TargetSettings {
  double point_diameter_deg = 0.15;
  double gaussian_sigma_deg = 0.25;
  double ccp_outer_diameter_deg = 0.6;
  double ccp_cross_width_deg = 0.2;
  double ccp_center_dot_deg = 0.2;
  double bessel_cycles_per_deg = 3.0;
  double opacity = 1.0;
  bool operator==(const TargetSettings&) const = default;
};

struct FixationSettings {
  StimulusMode stimulus_mode = StimulusMode::Dot;
  double shrink_start_deg = 1.0;
  double shrink_end_deg = 0.2;
  bool operator==(const FixationSettings&) const = default;
};

struct PursuitSettings {
  double velocity_deg_s = 10.0;
  double velocity_increment_deg_s = 2.0;
  int trips = 4;
  int pause_ms = 500;
  /// Direction of linear motion, degrees counterclockwise from +x (0 = horizontal).
  double direction_deg = 0.0;
  double random_velocity_min_deg_s = 5.0;
  double random_velocity_max_deg_s = 15.0;
  double random_accel_min_deg_s2 = 0.0;
  double random_accel_max_deg_s2 = 10.0;
  double circular_radius_x_deg = 8.0;
  double circular_radius_y_deg = 6.0;
  int circular_period_ms = 4000;
  Rotation circular_direction = Rotation::CounterClockwise;
  int wander_duration_ms = 20000;
  /// Standard deviation of the per-millisecond heading increment.
  double wander_heading_sigma_deg = 0.5;
  double wander_margin_deg = 2.0;
  int sample_interval_ms = 16;
  bool operator==(const PursuitSettings&) const = default;
};

struct CognitiveSettings {
  int nback_n = 2;
  int nback_trials = 22;
  double nback_target_rate = 0.3;
  int stimulus_ms = 500;
  int inter_stimulus_ms = 2000;
  int stroop_trials = 24;
  double stroop_incongruent_ratio = 0.5;
  double stroop_fast_window_factor = 0.5;
  int arrow_moves = 20;
  int arrow_cell_ms = 600;
  bool operator==(const CognitiveSettings&) const = default;
};

struct BlinkSettings {
  int long_interval_ms = 4000;
  int short_interval_ms = 1000;
  int cue_count = 10;
  bool operator==(const BlinkSettings&) const = default;
};

struct SlippageSettings {
  int step_duration_ms = 5000;
  int grid_rows = 3;
  int grid_cols = 3;
  bool operator==(const SlippageSettings&) const = default;
};

struct ContentSettings {
  /// Empty selects the built-in asset for the step's content kind.
  std::string media_ref;
  int duration_ms = 30000;
  bool operator==(const ContentSettings&) const = default;
};

struct VergenceSettings {
  std::vector<double> depths_cm{40.0, 60.0, 80.0};
  int dwell_ms = 2000;
  bool marker_mode = true;
  bool operator==(const VergenceSettings&) const = default;
};

struct CalibrationSettings {
  int point_duration_ms = 1500;
  int pause_ms = 300;
  bool operator==(const CalibrationSettings&) const = default;
};

struct MarkerSettings {
  int size_px = 96;
  int display_ms = 500;
  bool show_edge_markers = true;
  bool operator==(const MarkerSettings&) const = default;
};

struct BreakSettings {
  int duration_ms = 10000;
  bool operator==(const BreakSettings&) const = default;
};

struct QuestionnaireSettings {
  bool nasa_tlx_weighted = false;
  /// Instrument document for questionnaire-custom steps (null otherwise).
  Json custom_instrument = nullptr;
  bool operator==(const QuestionnaireSettings&) const = default;
};

/// Complete parameter profile. Field names in JSON follow the event-log
/// convention (fixationDotType, gridRows, displayDuration, ...).
struct SettingsPreset {
  DotType fixation_dot_type = DotType::Circle;
  double fixation_dot_size_deg = 1.0;
  Polarity polarity = Polarity::DarkOnGray;
  std::array<double, 4> dot_color_rgba{0.0, 0.0, 0.0, 1.0};
  int grid_rows = 3;
  int grid_cols = 3;
  int display_duration_ms = 1500;
  int pause_duration_ms = 300;
  double screen_width_cm = 60.5;
  double screen_height_cm = 33.5;
  double viewing_distance_cm = 60.0;
  int viewport_width_px = 1920;
  int viewport_height_px = 1080;

  TargetSettings target;
  FixationSettings fixation;
  PursuitSettings pursuit;
  CognitiveSettings cognitive;
  BlinkSettings blink;
  SlippageSettings slippage;
  ContentSettings content;
  VergenceSettings vergence;
  CalibrationSettings calibration;
  MarkerSettings markers;
  BreakSettings break_;
  QuestionnaireSettings questionnaire;

  bool operator==(const SettingsPreset&) const = default;

  double px_per_cm_x() const { return viewport_width_px / screen_width_cm; }
  double px_per_cm_y() const { return viewport_height_px / screen_height_cm; }
};

inline constexpr std::string_view kPresetSchemaVersion = "stimforge.preset/1";

Json to_json(const SettingsPreset& preset);

/// Strict parse: unknown keys are rejected, missing keys take defaults.
SettingsPreset settings_from_json(const Json& json, const std::string& path = "settings");

/// Top-level JSON keys of SettingsPreset, including group names.
std::span<const std::string_view> settings_keys();

/// Standalone `.preset.json` document.
struct PresetDocument {
  std::string name;
  SettingsPreset settings;
  bool operator==(const PresetDocument&) const = default;
};

std::string serialize_preset(const PresetDocument& doc);
PresetDocument parse_preset(std::string_view text);

}  // namespace stimforge::protocol

#include "stimforge/trajectory/fixation.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "stimforge/common/error.hpp"
#include "stimforge/common/rng.hpp"
#include "stimforge/markers/ids.hpp"

namespace stimforge::trajectory {
namespace {

using protocol::SettingsPreset;
using protocol::StimulusMode;

/// Largest on-screen diameter the target reaches, in px.
double max_target_px(const SettingsPreset& s, const DisplayGeometry& g) {
  double deg = s.fixation_dot_size_deg;
  if (s.fixation.stimulus_mode == StimulusMode::Shrinking) {
    deg = std::max(s.fixation.shrink_start_deg, s.fixation.shrink_end_deg);
  }
  return std::max(g.deg_to_px_x(deg), g.deg_to_px_y(deg));
}

void apply_stimulus_mode(TimedTarget& t, const SettingsPreset& s, Rng& orientations) {
  t.size_deg = s.fixation_dot_size_deg;
  switch (s.fixation.stimulus_mode) {
    case StimulusMode::Dot: t.kind = TargetKind::Dot; break;
    case StimulusMode::E:
      t.kind = TargetKind::E;
      t.orientation = static_cast<EOrientation>(orientations.below(4));
      break;
    case StimulusMode::Shrinking:
      t.kind = TargetKind::ShrinkingDot;
      t.size_deg = s.fixation.shrink_start_deg;
      t.end_size_deg = s.fixation.shrink_end_deg;
      break;
  }
}

TimedTarget interior_target(const DisplayGeometry& g, double fx, double fy) {
  const auto& r = g.interior;
  return make_target(g, r.x0 + fx * r.width(), r.y0 + fy * r.height());
}

}  // namespace

std::vector<TimedTarget> fixation_grid(const SettingsPreset& s, int rows, int cols, FixationMode mode,
                                       std::uint64_t seed) {
  if (rows < 1 || cols < 1 || rows > 20 || cols > 20) {
    throw Error(Errc::invalid_argument, "fixation grid must be between 1x1 and 20x20");
  }
  if (s.display_duration_ms <= 0 || s.pause_duration_ms < 0) {
    throw Error(Errc::invalid_argument, "fixation timing: display must be > 0 and pause >= 0");
  }
  const auto g = display_geometry(s);
  const double cell_w = g.interior.width() / cols;
  const double cell_h = g.interior.height() / rows;
  const double dot = max_target_px(s, g);
  if (dot > cell_w || dot > cell_h) {
    throw Error(Errc::invalid_argument, "fixation grid too dense: target of " + std::to_string(dot) +
                                            " px does not fit a " + std::to_string(cell_w) + "x" +
                                            std::to_string(cell_h) + " px cell");
  }

  std::vector<std::pair<int, int>> order;
  order.reserve(static_cast<std::size_t>(rows * cols));
  if (mode == FixationMode::Vertical) {
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) order.emplace_back(r, c);
  } else {
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) order.emplace_back(r, c);
  }
  // Separate streams so toggling E mode never changes the visiting order.
  if (mode == FixationMode::Random) {
    Rng rng(Rng::derive(seed, 1));
    rng.shuffle(std::span(order));
  }
  Rng orientations(Rng::derive(seed, 2));

  std::vector<TimedTarget> out;
  out.reserve(order.size());
  const std::int64_t slot = s.display_duration_ms + s.pause_duration_ms;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto [r, c] = order[i];
    auto t = interior_target(g, (c + 0.5) / cols, (r + 0.5) / rows);
    t.onset_ms = static_cast<std::int64_t>(i) * slot;
    t.duration_ms = s.display_duration_ms;
    t.label = "r" + std::to_string(r) + "c" + std::to_string(c);
    apply_stimulus_mode(t, s, orientations);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TimedTarget> fixation_sequence(const SettingsPreset& s, FixationMode mode, std::uint64_t seed) {
  return fixation_grid(s, s.grid_rows, s.grid_cols, mode, seed);
}

CalibrationLayout calibration_points(int n, const SettingsPreset& s) {
  static constexpr double a = 1.0 / 6, m = 0.5, b = 5.0 / 6;
  std::vector<std::array<double, 2>> pts;
  switch (n) {
    case 0: break;
    case 1: pts = {{m, m}}; break;
    case 3: pts = {{a, m}, {m, m}, {b, m}}; break;
    case 5: pts = {{m, m}, {a, a}, {b, a}, {b, b}, {a, b}}; break;
    case 9:
      for (double y : {a, m, b})
        for (double x : {a, m, b}) pts.push_back({x, y});
      break;
    default: throw Error(Errc::invalid_argument, "calibration point count must be 1, 3, 5 or 9");
  }
  if (s.calibration.point_duration_ms <= 0 || s.calibration.pause_ms < 0) {
    throw Error(Errc::invalid_argument, "calibration timing: point duration must be > 0 and pause >= 0");
  }
  const auto g = display_geometry(s);
  const std::int64_t slot = s.calibration.point_duration_ms + s.calibration.pause_ms;
  std::int64_t onset = 0;
  auto place = [&](double fx, double fy, const std::string& label) {
    auto t = interior_target(g, fx, fy);
    t.onset_ms = onset;
    t.duration_ms = s.calibration.point_duration_ms;
    t.kind = TargetKind::Dot;
    t.size_deg = s.fixation_dot_size_deg;
    t.label = label;
    onset += slot;
    return t;
  };
  CalibrationLayout out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.calibration.push_back(place(pts[i][0], pts[i][1], "cal" + std::to_string(i + 1)));
  }
  static constexpr std::array<std::array<double, 2>, 4> kValidation{{{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}}};
  for (std::size_t i = 0; i < kValidation.size(); ++i) {
    out.validation.push_back(place(kValidation[i][0], kValidation[i][1], "val" + std::to_string(i + 1)));
  }
  return out;
}

std::string_view to_string(SlippageKind kind) {
  switch (kind) {
    case SlippageKind::FixationGrid: return "fixation-grid";
    case SlippageKind::CentralFixation: return "central-fixation";
    case SlippageKind::SpeechFixation: return "speech-fixation";
    case SlippageKind::EyebrowMovement: return "eyebrow-raise-furrow";
    case SlippageKind::HeadRoll: return "head-roll";
    case SlippageKind::HeadPitch: return "head-pitch";
    case SlippageKind::HeadYaw: return "head-yaw";
    case SlippageKind::TranslateLateral: return "translate-lateral";
    case SlippageKind::TranslateVertical: return "translate-vertical";
    case SlippageKind::TranslateDepth: return "translate-depth";
    case SlippageKind::ReturnToStart: return "return-to-start";
    case SlippageKind::PostFixationGrid: return "post-fixation-grid";
  }
  return "fixation-grid";
}

std::vector<SlippageStep> slippage_sequence(const SettingsPreset& s) {
  if (s.slippage.step_duration_ms <= 0) {
    throw Error(Errc::invalid_argument, "slippage step duration must be positive");
  }
  struct Def {
    SlippageKind kind;
    const char* text;
  };
  static constexpr std::array<Def, 12> kSteps{{
      {SlippageKind::FixationGrid, "Look at each dot as it appears."},
      {SlippageKind::CentralFixation, "Keep looking at the central dot."},
      {SlippageKind::SpeechFixation, "Keep looking at the central dot while counting aloud from one."},
      {SlippageKind::EyebrowMovement, "Keep looking at the dot. Raise your eyebrows, then furrow them. Repeat."},
      {SlippageKind::HeadRoll, "Keep looking at the dot. Tilt your head towards each shoulder."},
      {SlippageKind::HeadPitch, "Keep looking at the dot. Nod your head up and down."},
      {SlippageKind::HeadYaw, "Keep looking at the dot. Turn your head left and right."},
      {SlippageKind::TranslateLateral, "Keep looking at the dot. Shift your head slightly left and right."},
      {SlippageKind::TranslateVertical, "Keep looking at the dot. Shift your head slightly up and down."},
      {SlippageKind::TranslateDepth, "Keep looking at the dot. Move your head slightly towards and away from the screen."},
      {SlippageKind::ReturnToStart, "Return to your starting position and look at the central dot."},
      {SlippageKind::PostFixationGrid, "Look at each dot as it appears."},
  }};
  const auto g = display_geometry(s);
  std::vector<SlippageStep> out;
  std::int64_t onset = 0;
  for (int i = 0; i < 12; ++i) {
    SlippageStep step;
    step.step_index = i + 1;
    step.kind = kSteps[i].kind;
    step.instruction_text = kSteps[i].text;
    step.marker_id = markers::slippage_step_marker(i + 1);
    step.onset_ms = onset;
    if (i == 0 || i == 11) {
      auto grid = fixation_grid(s, s.slippage.grid_rows, s.slippage.grid_cols, FixationMode::Horizontal, 0);
      step.duration_ms = grid.back().onset_ms + grid.back().duration_ms;
      for (auto& t : grid) t.onset_ms += onset;
      step.targets = std::move(grid);
    } else {
      step.duration_ms = s.slippage.step_duration_ms;
      auto t = interior_target(g, 0.5, 0.5);
      t.onset_ms = onset;
      t.duration_ms = step.duration_ms;
      t.size_deg = s.fixation_dot_size_deg;
      t.label = "center";
      step.targets.push_back(std::move(t));
    }
    onset += step.duration_ms;
    out.push_back(std::move(step));
  }
  return out;
}

std::vector<VergenceStep> vergence_schedule(const std::vector<double>& depths_cm, int dwell_ms, bool marker_mode) {
  if (depths_cm.empty()) throw Error(Errc::invalid_argument, "vergence: depth list is empty");
  if (dwell_ms <= 0) throw Error(Errc::invalid_argument, "vergence: dwell must be positive");
  if (marker_mode && depths_cm.size() > static_cast<std::size_t>(markers::kMaxVergenceDepths)) {
    throw Error(Errc::invalid_argument, "vergence: at most " + std::to_string(markers::kMaxVergenceDepths) +
                                            " depths in marker mode");
  }
  std::vector<VergenceStep> out;
  for (std::size_t i = 0; i < depths_cm.size(); ++i) {
    if (!(depths_cm[i] > 0)) throw Error(Errc::invalid_argument, "vergence: depths must be positive");
    VergenceStep v;
    v.index = static_cast<int>(i);
    v.onset_ms = static_cast<std::int64_t>(i) * dwell_ms;
    v.duration_ms = dwell_ms;
    v.depth_cm = depths_cm[i];
    if (marker_mode) v.marker_id = markers::vergence_depth_marker(static_cast<int>(i));
    out.push_back(v);
  }
  return out;
}

}  // namespace stimforge::trajectory

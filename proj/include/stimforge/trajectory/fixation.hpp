#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stimforge/trajectory/geometry.hpp"

namespace stimforge::trajectory {

enum class FixationMode { Horizontal, Vertical, Random };

/// Grid targets inside the marker-free interior. Column c of C sits at
/// x0 + (c + 0.5) * width / C, rows likewise. Horizontal visits row-major,
/// vertical column-major, random a seeded permutation. Each target shows
/// for displayDuration with pauseDuration between targets.
///
/// The seed also draws E orientations. Throws invalid_argument when the
/// target is wider than a grid cell or the grid is outside 1..20.
std::vector<TimedTarget> fixation_sequence(const protocol::SettingsPreset& settings, FixationMode mode,
                                           std::uint64_t seed);

/// Same, for an explicit grid size and timing (slippage steps 1 and 12).
std::vector<TimedTarget> fixation_grid(const protocol::SettingsPreset& settings, int rows, int cols,
                                       FixationMode mode, std::uint64_t seed);

/// Calibration targets followed by the 4-point validation phase.
struct CalibrationLayout {
  std::vector<TimedTarget> calibration;
  std::vector<TimedTarget> validation;
};

/// n = 9: 3x3 at interior fractions 1/6, 1/2, 5/6. n = 5: centre and the
/// four corners of that grid. n = 3: horizontal midline at 1/6, 1/2, 5/6.
/// n = 1: centre. Validation targets sit at the quadrant centres (1/4, 3/4).
/// n = 0 yields only the validation phase (standalone validation step).
CalibrationLayout calibration_points(int n, const protocol::SettingsPreset& settings);

enum class SlippageKind {
  FixationGrid,
  CentralFixation,
  SpeechFixation,
  EyebrowMovement,
  HeadRoll,
  HeadPitch,
  HeadYaw,
  TranslateLateral,
  TranslateVertical,
  TranslateDepth,
  ReturnToStart,
  PostFixationGrid,
};

std::string_view to_string(SlippageKind kind);

struct SlippageStep {
  int step_index = 0;  // 1..12
  SlippageKind kind = SlippageKind::FixationGrid;
  std::int64_t onset_ms = 0;
  std::int64_t duration_ms = 0;
  int marker_id = 0;
  std::string instruction_text;
  /// Grid targets for steps 1 and 12, a central target otherwise. Onsets
  /// are relative to task start.
  std::vector<TimedTarget> targets;
};

/// The 12-step slippage protocol.
std::vector<SlippageStep> slippage_sequence(const protocol::SettingsPreset& settings);

struct VergenceStep {
  int index = 0;
  std::int64_t onset_ms = 0;
  std::int64_t duration_ms = 0;
  double depth_cm = 0;
  std::optional<int> marker_id;
};

/// Throws invalid_argument for an empty depth list, non-positive depth or
/// dwell, or more depths than marker slots when marker_mode is on.
std::vector<VergenceStep> vergence_schedule(const std::vector<double>& depths_cm, int dwell_ms, bool marker_mode);

}  // namespace stimforge::trajectory

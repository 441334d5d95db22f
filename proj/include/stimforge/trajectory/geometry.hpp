#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "stimforge/markers/layout.hpp"
#include "stimforge/protocol/settings.hpp"

namespace stimforge::trajectory {

/// Size on screen of a visual angle: tan(angle) * distance * px_per_cm.
/// Throws invalid_argument for negative inputs or angles >= 90 degrees.
double deg_to_px(double angle_deg, double viewing_distance_cm, double px_per_cm);

/// Inverse of deg_to_px.
double px_to_deg(double px, double viewing_distance_cm, double px_per_cm);

/// Physical display plus the stimulus area left free by the edge markers.
struct DisplayGeometry {
  int viewport_w_px = 0;
  int viewport_h_px = 0;
  double screen_w_cm = 0;
  double screen_h_cm = 0;
  double viewing_distance_cm = 0;
  markers::Rect interior;

  double px_per_cm_x() const { return viewport_w_px / screen_w_cm; }
  double px_per_cm_y() const { return viewport_h_px / screen_h_cm; }
  /// Top-left-origin plane coordinates, as logged in xCm/yCm.
  double x_cm(double x_px) const { return x_px * screen_w_cm / viewport_w_px; }
  double y_cm(double y_px) const { return y_px * screen_h_cm / viewport_h_px; }
  double deg_to_px_x(double deg) const { return deg_to_px(deg, viewing_distance_cm, px_per_cm_x()); }
  double deg_to_px_y(double deg) const { return deg_to_px(deg, viewing_distance_cm, px_per_cm_y()); }
};

/// Throws invalid_argument for non-positive dimensions or a viewport too
/// small for the edge-marker layout.
DisplayGeometry display_geometry(const protocol::SettingsPreset& settings);

enum class TargetKind { Dot, E, ShrinkingDot };
enum class EOrientation { Up, Down, Left, Right };

std::string_view to_string(TargetKind kind);
std::string_view to_string(EOrientation o);
std::optional<EOrientation> e_orientation_from_string(std::string_view name);

/// One stationary target presentation.
struct TimedTarget {
  /// Relative to task start.
  std::int64_t onset_ms = 0;
  std::int64_t duration_ms = 0;
  double x_px = 0;
  double y_px = 0;
  double x_cm = 0;
  double y_cm = 0;
  TargetKind kind = TargetKind::Dot;
  EOrientation orientation = EOrientation::Up;  // E only
  double size_deg = 0;                          // diameter; start size for ShrinkingDot
  double end_size_deg = 0;                      // ShrinkingDot only
  std::string label;
  bool operator==(const TimedTarget&) const = default;
};

/// Target at (x_px, y_px) with its cm coordinates filled in.
TimedTarget make_target(const DisplayGeometry& geom, double x_px, double y_px);

}  // namespace stimforge::trajectory

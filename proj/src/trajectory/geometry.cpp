#include "stimforge/trajectory/geometry.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "stimforge/common/error.hpp"

namespace stimforge::trajectory {

double deg_to_px(double angle_deg, double viewing_distance_cm, double px_per_cm) {
  if (!(angle_deg >= 0) || !(viewing_distance_cm > 0) || !(px_per_cm > 0)) {
    throw Error(Errc::invalid_argument, "deg_to_px: angle must be >= 0, distance and scale > 0");
  }
  if (angle_deg >= 90.0) throw Error(Errc::invalid_argument, "deg_to_px: angle must be below 90 degrees");
  return std::tan(angle_deg * std::numbers::pi / 180.0) * viewing_distance_cm * px_per_cm;
}

double px_to_deg(double px, double viewing_distance_cm, double px_per_cm) {
  if (!(px >= 0) || !(viewing_distance_cm > 0) || !(px_per_cm > 0)) {
    throw Error(Errc::invalid_argument, "px_to_deg: size must be >= 0, distance and scale > 0");
  }
  return std::atan(px / (viewing_distance_cm * px_per_cm)) * 180.0 / std::numbers::pi;
}

DisplayGeometry display_geometry(const protocol::SettingsPreset& s) {
  if (!(s.screen_width_cm > 0) || !(s.screen_height_cm > 0) || !(s.viewing_distance_cm > 0)) {
    throw Error(Errc::invalid_argument, "screen size and viewing distance must be positive");
  }
  DisplayGeometry g;
  g.viewport_w_px = s.viewport_width_px;
  g.viewport_h_px = s.viewport_height_px;
  g.screen_w_cm = s.screen_width_cm;
  g.screen_h_cm = s.screen_height_cm;
  g.viewing_distance_cm = s.viewing_distance_cm;
  g.interior = markers::edge_marker_layout(s.viewport_width_px, s.viewport_height_px, s.markers.size_px).interior;
  return g;
}

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::Dot: return "dot";
    case TargetKind::E: return "E";
    case TargetKind::ShrinkingDot: return "shrinking";
  }
  return "dot";
}

namespace {
constexpr std::array<std::pair<EOrientation, std::string_view>, 4> kOrientations{{
    {EOrientation::Up, "up"},
    {EOrientation::Down, "down"},
    {EOrientation::Left, "left"},
    {EOrientation::Right, "right"},
}};
}  // namespace

std::string_view to_string(EOrientation o) {
  for (const auto& [v, name] : kOrientations) {
    if (v == o) return name;
  }
  return "up";
}

std::optional<EOrientation> e_orientation_from_string(std::string_view name) {
  for (const auto& [v, n] : kOrientations) {
    if (n == name) return v;
  }
  return std::nullopt;
}

TimedTarget make_target(const DisplayGeometry& geom, double x_px, double y_px) {
  TimedTarget t;
  t.x_px = x_px;
  t.y_px = y_px;
  t.x_cm = geom.x_cm(x_px);
  t.y_cm = geom.y_cm(y_px);
  return t;
}

}  // namespace stimforge::trajectory

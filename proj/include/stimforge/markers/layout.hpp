#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "stimforge/markers/ids.hpp"

namespace stimforge::markers {

/// Axis-aligned rectangle in viewport pixels, half-open in neither
/// direction: [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double center_x() const { return 0.5 * (x0 + x1); }
  double center_y() const { return 0.5 * (y0 + y1); }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  /// Positive-area overlap (shared edges do not count).
  bool overlaps(const Rect& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
  bool operator==(const Rect&) const = default;
};

enum class Edge { Top, Right, Bottom, Left };

struct EdgeMarker {
  int marker_id = 0;
  Edge edge = Edge::Top;
  double center_x = 0;
  double center_y = 0;
  int size_px = 0;

  Rect square() const {
    const double h = size_px / 2.0;
    return {center_x - h, center_y - h, center_x + h, center_y + h};
  }
  /// Corners in detection winding order: top-left, top-right, bottom-right, bottom-left.
  std::array<std::array<double, 2>, 4> corners() const;
};

struct EdgeLayout {
  std::vector<EdgeMarker> markers;
  /// Marker-free region available for stimuli.
  Rect interior;
};

/// Gap between a marker and the viewport border, and between the marker
/// band and the interior, as a fraction of marker size.
inline constexpr double kQuietZoneFraction = 0.25;

/// 14 markers: top and bottom centred at x = {1/8, 3/8, 5/8, 7/8} of the
/// width, left and right at y = {1/4, 1/2, 3/4} of the height. IDs run
/// clockwise: top 0..3 (left to right), right 4..6 (top to bottom),
/// bottom 7..10 (right to left), left 11..13 (bottom to top).
/// Throws invalid_argument when the viewport cannot hold the layout.
EdgeLayout edge_marker_layout(int viewport_w_px, int viewport_h_px, int marker_size_px);

/// Spatial and temporal marker assignment for one session.
struct MarkerPlan {
  int viewport_w_px = 0;
  int viewport_h_px = 0;
  std::vector<EdgeMarker> edge_markers;
  Rect interior;
  /// Keyed by step_id.
  std::map<std::string, MarkerPair> task_markers;

  const EdgeMarker* find_edge(int marker_id) const;
};

MarkerPlan make_marker_plan(int viewport_w_px, int viewport_h_px, int marker_size_px);

}  // namespace stimforge::markers

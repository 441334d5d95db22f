#include "stimforge/markers/layout.hpp"

#include "stimforge/common/error.hpp"

namespace stimforge::markers {

std::array<std::array<double, 2>, 4> EdgeMarker::corners() const {
  const double h = size_px / 2.0;
  return {{{center_x - h, center_y - h},
           {center_x + h, center_y - h},
           {center_x + h, center_y + h},
           {center_x - h, center_y + h}}};
}

EdgeLayout edge_marker_layout(int w, int h, int size) {
  if (w <= 0 || h <= 0 || size <= 0) {
    throw Error(Errc::invalid_argument, "edge layout: viewport and marker size must be positive");
  }
  const double s = size;
  const double quiet = kQuietZoneFraction * s;
  const double band = quiet + s;  // distance from border to the inner side of a marker
  const double top_y = quiet + s / 2;
  const double bottom_y = h - quiet - s / 2;
  const double left_x = quiet + s / 2;
  const double right_x = w - quiet - s / 2;

  EdgeLayout layout;
  int id = 0;
  auto add = [&](Edge e, double x, double y) { layout.markers.push_back({id++, e, x, y, size}); };
  for (double f : {1.0 / 8, 3.0 / 8, 5.0 / 8, 7.0 / 8}) add(Edge::Top, f * w, top_y);
  for (double f : {1.0 / 4, 1.0 / 2, 3.0 / 4}) add(Edge::Right, right_x, f * h);
  for (double f : {7.0 / 8, 5.0 / 8, 3.0 / 8, 1.0 / 8}) add(Edge::Bottom, f * w, bottom_y);
  for (double f : {3.0 / 4, 1.0 / 2, 1.0 / 4}) add(Edge::Left, left_x, f * h);

  layout.interior = {band + quiet, band + quiet, w - band - quiet, h - band - quiet};

  const Rect viewport{0, 0, static_cast<double>(w), static_cast<double>(h)};
  for (std::size_t i = 0; i < layout.markers.size(); ++i) {
    const Rect a = layout.markers[i].square();
    if (a.x0 < viewport.x0 || a.y0 < viewport.y0 || a.x1 > viewport.x1 || a.y1 > viewport.y1) {
      throw Error(Errc::invalid_argument, "edge layout: viewport too small for marker size");
    }
    for (std::size_t j = i + 1; j < layout.markers.size(); ++j) {
      if (a.overlaps(layout.markers[j].square())) {
        throw Error(Errc::invalid_argument, "edge layout: viewport too small, markers " +
                                                std::to_string(i) + " and " + std::to_string(j) + " overlap");
      }
    }
  }
  if (layout.interior.width() <= 0 || layout.interior.height() <= 0) {
    throw Error(Errc::invalid_argument, "edge layout: no interior region left for stimuli");
  }
  return layout;
}

const EdgeMarker* MarkerPlan::find_edge(int marker_id) const {
  for (const auto& m : edge_markers) {
    if (m.marker_id == marker_id) return &m;
  }
  return nullptr;
}

MarkerPlan make_marker_plan(int w, int h, int size) {
  auto layout = edge_marker_layout(w, h, size);
  MarkerPlan plan;
  plan.viewport_w_px = w;
  plan.viewport_h_px = h;
  plan.edge_markers = std::move(layout.markers);
  plan.interior = layout.interior;
  return plan;
}

}  // namespace stimforge::markers

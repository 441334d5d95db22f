#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stimforge/common/json.hpp"

namespace stimforge::markers {

/// One marker seen in one scene-camera frame. Corners follow the marker's
/// own winding: top-left, top-right, bottom-right, bottom-left.
struct DetectionRecord {
  double camera_ts_ms = 0;
  int marker_id = 0;
  std::array<std::array<double, 2>, 4> corners{};
  bool operator==(const DetectionRecord&) const = default;
};

Json to_json(const DetectionRecord& record);
DetectionRecord detection_from_json(const Json& json);

/// Newline-delimited detection stream. Reading checks that timestamps do
/// not decrease.
void write_detections(std::ostream& out, std::span<const DetectionRecord> records);
std::vector<DetectionRecord> read_detections(std::istream& in);

}  // namespace stimforge::markers

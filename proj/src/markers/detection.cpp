#include "stimforge/markers/detection.hpp"

#include <istream>
#include <ostream>

namespace stimforge::markers {

Json to_json(const DetectionRecord& d) {
  Json corners = Json::array();
  for (const auto& c : d.corners) corners.push_back({c[0], c[1]});
  return {{"camera_ts_ms", d.camera_ts_ms}, {"marker_id", d.marker_id}, {"corners", corners}};
}

DetectionRecord detection_from_json(const Json& json) {
  ObjectReader r(json, "detection");
  DetectionRecord d;
  d.camera_ts_ms = r.get<double>("camera_ts_ms");
  d.marker_id = r.get<int>("marker_id");
  const Json& corners = r.at("corners");
  if (!corners.is_array() || corners.size() != 4) {
    throw Error(Errc::parse_error, "detection.corners: expected 4 corners");
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const Json& c = corners[i];
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
      throw Error(Errc::parse_error, "detection.corners: each corner must be [u, v]");
    }
    d.corners[i] = {c[0].get<double>(), c[1].get<double>()};
  }
  r.finish();
  return d;
}

void write_detections(std::ostream& out, std::span<const DetectionRecord> records) {
  for (const auto& d : records) out << to_json(d).dump() << '\n';
}

std::vector<DetectionRecord> read_detections(std::istream& in) {
  std::vector<DetectionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    DetectionRecord d;
    try {
      d = detection_from_json(parse_json(line));
    } catch (const Error& e) {
      throw Error(Errc::parse_error, "detections line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!out.empty() && d.camera_ts_ms < out.back().camera_ts_ms) {
      throw Error(Errc::timestamp_regression,
                  "detections line " + std::to_string(line_no) + ": camera_ts_ms decreases");
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace stimforge::markers

#include "stimforge/markers/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "stimforge/common/error.hpp"
#include "stimforge/common/rng.hpp"
#include "stimforge/protocol/settings.hpp"

namespace stimforge::markers {
namespace {

using eventlog::LogEntry;
namespace ev = eventlog::event;

struct TaskSpan {
  std::string step_id;
  std::string task_name;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  int start_marker = -1;
  int end_marker = -1;
  int display_ms = 500;
  bool show_edges = true;
  bool closed = false;
};

std::optional<int> marker_of(const LogEntry& e) {
  auto it = e.details.find("markerId");
  if (it == e.details.end() || !it->is_number_integer()) return std::nullopt;
  return it->get<int>();
}

std::string step_id_of(const LogEntry& e) {
  auto it = e.details.find("stepId");
  return it != e.details.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

std::vector<TaskSpan> task_spans(std::span<const LogEntry> log) {
  std::vector<TaskSpan> spans;
  for (const auto& e : log) {
    if (e.event_type == ev::kTaskStart) {
      TaskSpan s;
      s.step_id = step_id_of(e);
      s.task_name = e.task_name.value_or("");
      s.start_ts = e.timestamp;
      s.start_marker = marker_of(e).value_or(-1);
      if (auto cs = e.details.find("currentSettings"); cs != e.details.end()) {
        const auto settings = protocol::settings_from_json(*cs, "currentSettings");
        s.display_ms = settings.markers.display_ms;
        s.show_edges = settings.markers.show_edge_markers;
      }
      spans.push_back(std::move(s));
    } else if (e.event_type == ev::kTaskEnd && !spans.empty() && !spans.back().closed) {
      spans.back().end_ts = e.timestamp;
      spans.back().end_marker = marker_of(e).value_or(-1);
      spans.back().closed = true;
    }
  }
  return spans;
}

}  // namespace

MarkerPlan marker_plan_from_log(std::span<const LogEntry> log) {
  std::optional<MarkerPlan> plan;
  for (const auto& e : log) {
    if (e.event_type != ev::kTaskStart) continue;
    auto cs = e.details.find("currentSettings");
    if (cs == e.details.end()) continue;
    const auto s = protocol::settings_from_json(*cs, "currentSettings");
    if (!plan) plan = make_marker_plan(s.viewport_width_px, s.viewport_height_px, s.markers.size_px);
  }
  if (!plan) throw Error(Errc::invalid_argument, "log has no TaskStart with a settings snapshot");
  for (const auto& s : task_spans(log)) {
    if (s.start_marker >= 0 && s.end_marker >= 0) plan->task_markers[s.step_id] = {s.start_marker, s.end_marker};
  }
  return *plan;
}

std::vector<MarkerInterval> marker_intervals_from_log(std::span<const LogEntry> log, const MarkerPlan& plan) {
  std::vector<MarkerInterval> out;
  const auto spans = task_spans(log);
  std::size_t task = 0;
  int display_ms = 500;
  for (const auto& e : log) {
    if (e.event_type == ev::kTaskStart && task < spans.size()) display_ms = spans[task++].display_ms;
    if (auto id = marker_of(e)) {
      out.push_back({*id, static_cast<double>(e.timestamp), static_cast<double>(e.timestamp + display_ms)});
    }
  }
  for (const auto& s : spans) {
    if (!s.show_edges || !s.closed) continue;
    for (const auto& m : plan.edge_markers) {
      out.push_back({m.marker_id, static_cast<double>(s.start_ts), static_cast<double>(s.end_ts + s.display_ms)});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.start_ms < b.start_ms; });
  return out;
}

std::vector<DetectionRecord> simulate_camera(std::span<const LogEntry> log, const MarkerPlan& plan,
                                             const ScreenPose& pose, const CameraIntrinsics& intr,
                                             const CameraSimulation& sim) {
  if (!(sim.fps > 0)) throw Error(Errc::invalid_argument, "simulate_camera: fps must be positive");
  auto intervals = marker_intervals_from_log(log, plan);
  if (!sim.emit_edge_markers) {
    std::erase_if(intervals, [](const auto& iv) { return iv.marker_id < kEdgeMarkerCount; });
  }
  std::vector<DetectionRecord> out;
  if (intervals.empty()) return out;

  Rng rng(sim.seed);
  const double frame_ms = 1000.0 / sim.fps;
  const double phase = sim.phase_ms.value_or(rng.uniform01() * frame_ms);

  const Viewport viewport{plan.viewport_w_px, plan.viewport_h_px};
  // Edge marker corners do not move for a static pose; project them once.
  std::unordered_map<int, std::array<std::array<double, 2>, 4>> edge_corners;
  for (const auto& m : plan.edge_markers) edge_corners[m.marker_id] = project_marker_corners(m, pose, intr, viewport);
  // Task markers are drawn at the interior centre at the edge-marker size.
  EdgeMarker center_marker{0, Edge::Top, plan.interior.center_x(), plan.interior.center_y(),
                           plan.edge_markers.empty() ? 96 : plan.edge_markers.front().size_px};
  const auto center_corners = project_marker_corners(center_marker, pose, intr, viewport);

  // Frame k is exposed at camera time phase + k * frame_ms; a marker is seen
  // on every frame whose log-clock time falls inside its display interval.
  for (const auto& iv : intervals) {
    auto k = static_cast<std::int64_t>(std::ceil((iv.start_ms + sim.clock_offset_ms - phase) / frame_ms));
    for (;; ++k) {
      const double camera_ts = phase + static_cast<double>(k) * frame_ms;
      const double log_ts = camera_ts - sim.clock_offset_ms;
      if (log_ts < iv.start_ms) continue;
      if (log_ts >= iv.end_ms) break;
      DetectionRecord d;
      d.camera_ts_ms = camera_ts;
      d.marker_id = iv.marker_id;
      auto it = edge_corners.find(iv.marker_id);
      d.corners = iv.marker_id < kEdgeMarkerCount && it != edge_corners.end() ? it->second : center_corners;
      out.push_back(d);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.camera_ts_ms != b.camera_ts_ms ? a.camera_ts_ms < b.camera_ts_ms : a.marker_id < b.marker_id;
  });
  if (sim.corner_noise_px > 0) {
    for (auto& d : out) {
      for (auto& c : d.corners) {
        c[0] += sim.corner_noise_px * rng.normal();
        c[1] += sim.corner_noise_px * rng.normal();
      }
    }
  }
  return out;
}

Json to_json(const AlignmentResult& result) {
  Json tasks = Json::array();
  for (const auto& t : result.tasks) {
    tasks.push_back({{"step_id", t.step_id},
                     {"task_name", t.task_name},
                     {"start_marker", t.start_marker},
                     {"end_marker", t.end_marker},
                     {"start_camera_ts_ms", t.start_camera_ts_ms},
                     {"end_camera_ts_ms", t.end_camera_ts_ms},
                     {"offset_ms", t.offset_ms},
                     {"residual_ms", t.residual_ms}});
  }
  Json unaligned = Json::array();
  for (const auto& u : result.unaligned) unaligned.push_back({{"step_id", u.step_id}, {"reason", u.reason}});
  return {{"tasks", tasks}, {"unaligned", unaligned}};
}

AlignmentResult align_timelines(std::span<const DetectionRecord> detections, std::span<const LogEntry> log) {
  std::map<int, double> first_seen;
  for (const auto& d : detections) {
    auto [it, inserted] = first_seen.emplace(d.marker_id, d.camera_ts_ms);
    if (!inserted) it->second = std::min(it->second, d.camera_ts_ms);
  }
  AlignmentResult result;
  for (const auto& s : task_spans(log)) {
    if (s.start_marker < 0 || !s.closed || s.end_marker < 0) continue;  // task shows no markers
    auto start = first_seen.find(s.start_marker);
    auto end = first_seen.find(s.end_marker);
    if (start == first_seen.end() || end == first_seen.end()) {
      result.unaligned.push_back({s.step_id, start == first_seen.end() ? "start marker " +
                                                                             std::to_string(s.start_marker) +
                                                                             " never detected"
                                                                       : "end marker " +
                                                                             std::to_string(s.end_marker) +
                                                                             " never detected"});
      continue;
    }
    TaskAlignment a;
    a.step_id = s.step_id;
    a.task_name = s.task_name;
    a.start_marker = s.start_marker;
    a.end_marker = s.end_marker;
    a.start_camera_ts_ms = start->second;
    a.end_camera_ts_ms = end->second;
    a.offset_ms = start->second - static_cast<double>(s.start_ts);
    const double end_offset = end->second - static_cast<double>(s.end_ts);
    a.residual_ms = std::abs(a.offset_ms - end_offset);
    if (!(a.end_camera_ts_ms > a.start_camera_ts_ms)) {
      result.unaligned.push_back({s.step_id, "end marker detected before start marker"});
      continue;
    }
    result.tasks.push_back(a);
  }
  if (result.tasks.empty()) {
    throw Error(Errc::alignment_impossible, "no task markers overlap between the detections and the log");
  }
  return result;
}

}  // namespace stimforge::markers

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stimforge/eventlog/entry.hpp"
#include "stimforge/markers/camera.hpp"
#include "stimforge/markers/detection.hpp"
#include "stimforge/markers/layout.hpp"
#include "stimforge/markers/pose.hpp"

namespace stimforge::markers {

/// Edge layout and per-task marker pairs recovered from a session log's
/// TaskStart/TaskEnd entries. Geometry comes from the first TaskStart
/// snapshot.
MarkerPlan marker_plan_from_log(std::span<const eventlog::LogEntry> log);

/// One interval during which a marker is on screen, in log-clock ms.
struct MarkerInterval {
  int marker_id = 0;
  double start_ms = 0;
  double end_ms = 0;  // exclusive
};

/// Marker display intervals implied by a log: every entry carrying
/// details.markerId shows that marker for the task's marker display window,
/// and edge markers stay up from TaskStart until the end marker disappears.
std::vector<MarkerInterval> marker_intervals_from_log(std::span<const eventlog::LogEntry> log,
                                                      const MarkerPlan& plan);

struct CameraSimulation {
  double fps = 30.0;
  /// camera clock = log clock + offset.
  double clock_offset_ms = 0.0;
  std::uint64_t seed = 0;
  /// First frame phase on the camera clock; drawn from the seed when unset.
  std::optional<double> phase_ms;
  bool emit_edge_markers = true;
  /// Gaussian corner noise (standard deviation, px).
  double corner_noise_px = 0.0;
};

/// Synthetic scene-camera detections for a session log.
std::vector<DetectionRecord> simulate_camera(std::span<const eventlog::LogEntry> log, const MarkerPlan& plan,
                                             const ScreenPose& pose, const CameraIntrinsics& intr,
                                             const CameraSimulation& sim);

struct TaskAlignment {
  std::string step_id;
  std::string task_name;
  int start_marker = 0;
  int end_marker = 0;
  double start_camera_ts_ms = 0;
  double end_camera_ts_ms = 0;
  /// camera clock - log clock, from the start marker.
  double offset_ms = 0;
  /// |offset from start marker - offset from end marker|.
  double residual_ms = 0;
};

struct UnalignedTask {
  std::string step_id;
  std::string reason;
};

struct AlignmentResult {
  std::vector<TaskAlignment> tasks;
  std::vector<UnalignedTask> unaligned;
};

Json to_json(const AlignmentResult& result);

/// Aligns by the first camera appearance of each task's start and end
/// marker. Tasks with a missing marker are reported unaligned. Throws
/// alignment_impossible if no task could be aligned.
AlignmentResult align_timelines(std::span<const DetectionRecord> detections,
                                std::span<const eventlog::LogEntry> log);

}  // namespace stimforge::markers

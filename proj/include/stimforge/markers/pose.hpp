#pragma once

#include <span>

#include "stimforge/markers/camera.hpp"
#include "stimforge/markers/detection.hpp"
#include "stimforge/markers/layout.hpp"

namespace stimforge::markers {

struct PoseOptions {
  /// Estimates whose corner RMS exceeds this are rejected as poor quality.
  double max_reprojection_rms_px = 2.0;
};

/// Recovers the display plane from edge-marker detections of one frame.
///
/// Plane-to-image homography by normalised DLT over all detected corners,
/// decomposed against the intrinsics into [r1 r2 t], then projected onto
/// the nearest rotation. Throws singular_configuration when fewer than four
/// edge markers are present or their centres are collinear, poor_quality
/// when the reprojection RMS exceeds the threshold.
ScreenPose estimate_screen_pose(std::span<const DetectionRecord> detections, const MarkerPlan& plan,
                                const CameraIntrinsics& intr, double screen_w_cm, double screen_h_cm,
                                const PoseOptions& options = {});

/// Image positions of an edge marker's corners under a given pose.
std::array<std::array<double, 2>, 4> project_marker_corners(const EdgeMarker& marker, const ScreenPose& pose,
                                                            const CameraIntrinsics& intr, Viewport viewport);

}  // namespace stimforge::markers

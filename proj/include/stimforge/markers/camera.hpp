#pragma once

#include <Eigen/Dense>

#include <vector>

#include "stimforge/common/json.hpp"

namespace stimforge::markers {

/// Pinhole intrinsics with optional Brown-Conrady distortion in OpenCV
/// order (k1, k2, p1, p2, k3). Missing trailing coefficients are zero.
struct CameraIntrinsics {
  double fx = 1000.0;
  double fy = 1000.0;
  double cx = 960.0;
  double cy = 540.0;
  std::vector<double> distortion;

  void validate() const;
};

Json to_json(const CameraIntrinsics& intr);
CameraIntrinsics intrinsics_from_json(const Json& json);

/// Rigid transform of the display plane into the camera frame plus the
/// display's pixel density.
///
/// Screen frame: origin at the physical screen centre, x to the right,
/// y downwards, z into the screen. A viewport pixel (x_px, y_px) sits at
/// (x_px / px_per_cm_x - W/2, y_px / px_per_cm_y - H/2, 0) cm.
struct ScreenPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation_cm = Eigen::Vector3d(0, 0, 60);
  double px_per_cm_x = 1.0;
  double px_per_cm_y = 1.0;
  /// RMS corner reprojection error of the estimate (0 for synthetic poses).
  double reprojection_rms_px = 0.0;
};

Json to_json(const ScreenPose& pose);
ScreenPose pose_from_json(const Json& json);

struct Viewport {
  int width_px = 0;
  int height_px = 0;
};

/// Rotation from intrinsic Z-Y-X Euler angles (yaw about z, pitch about y,
/// roll about x), degrees. R = Rz(yaw) * Ry(pitch) * Rx(roll).
Eigen::Matrix3d rotation_from_euler_deg(double roll_x, double pitch_y, double yaw_z);

/// Plane coordinates (cm, centre origin, z = 0) of a viewport pixel.
Eigen::Vector3d pixel_to_plane(const ScreenPose& pose, double x_px, double y_px, Viewport viewport);

/// Camera-frame position of a viewport pixel. Throws out_of_range for
/// pixels outside the viewport.
Eigen::Vector3d stimulus_to_3d(const ScreenPose& pose, double x_px, double y_px, Viewport viewport);

/// Inverse of stimulus_to_3d for points on the display plane.
Eigen::Vector2d camera_to_stimulus(const ScreenPose& pose, const Eigen::Vector3d& point_cm, Viewport viewport);

/// Applies distortion to normalised image coordinates.
Eigen::Vector2d distort_normalized(const CameraIntrinsics& intr, const Eigen::Vector2d& xy);

/// Iteratively removes distortion from normalised image coordinates.
Eigen::Vector2d undistort_normalized(const CameraIntrinsics& intr, const Eigen::Vector2d& xy);

/// Camera-frame point to image pixel. Throws invalid_argument behind the camera.
Eigen::Vector2d project_to_image(const CameraIntrinsics& intr, const Eigen::Vector3d& point_cm);

/// Pixel to undistorted normalised coordinates.
Eigen::Vector2d image_to_normalized(const CameraIntrinsics& intr, const Eigen::Vector2d& uv);

/// Back-projects an image pixel onto the display plane and returns the
/// viewport pixel it hits.
Eigen::Vector2d image_to_stimulus(const ScreenPose& pose, const CameraIntrinsics& intr, const Eigen::Vector2d& uv,
                                  Viewport viewport);

}  // namespace stimforge::markers

#include "stimforge/markers/camera.hpp"

#include <cmath>
#include <numbers>

#include "stimforge/common/error.hpp"

namespace stimforge::markers {
namespace {

double coeff(const CameraIntrinsics& intr, std::size_t i) {
  return i < intr.distortion.size() ? intr.distortion[i] : 0.0;
}

double screen_w_cm(const ScreenPose& p, Viewport v) { return v.width_px / p.px_per_cm_x; }
double screen_h_cm(const ScreenPose& p, Viewport v) { return v.height_px / p.px_per_cm_y; }

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0) || !(fy > 0)) throw Error(Errc::invalid_argument, "intrinsics: fx and fy must be positive");
  if (distortion.size() > 5) {
    throw Error(Errc::invalid_argument, "intrinsics: at most 5 distortion coefficients (k1,k2,p1,p2,k3)");
  }
}

Json to_json(const CameraIntrinsics& intr) {
  return {{"fx", intr.fx}, {"fy", intr.fy}, {"cx", intr.cx}, {"cy", intr.cy}, {"distortion", intr.distortion}};
}

CameraIntrinsics intrinsics_from_json(const Json& json) {
  ObjectReader r(json, "intrinsics");
  CameraIntrinsics intr;
  intr.fx = r.get<double>("fx");
  intr.fy = r.get<double>("fy");
  intr.cx = r.get<double>("cx");
  intr.cy = r.get<double>("cy");
  intr.distortion = r.get_or("distortion", std::vector<double>{});
  r.finish();
  intr.validate();
  return intr;
}

Json to_json(const ScreenPose& pose) {
  Json rot = Json::array();
  for (int i = 0; i < 3; ++i) rot.push_back({pose.rotation(i, 0), pose.rotation(i, 1), pose.rotation(i, 2)});
  return {{"rotation", rot},
          {"translation_cm", {pose.translation_cm.x(), pose.translation_cm.y(), pose.translation_cm.z()}},
          {"px_per_cm_x", pose.px_per_cm_x},
          {"px_per_cm_y", pose.px_per_cm_y},
          {"reprojection_rms_px", pose.reprojection_rms_px}};
}

ScreenPose pose_from_json(const Json& json) {
  ObjectReader r(json, "pose");
  ScreenPose pose;
  const auto rot = r.get<std::vector<std::vector<double>>>("rotation");
  if (rot.size() != 3) throw Error(Errc::parse_error, "pose.rotation: expected 3x3");
  for (int i = 0; i < 3; ++i) {
    if (rot[i].size() != 3) throw Error(Errc::parse_error, "pose.rotation: expected 3x3");
    for (int k = 0; k < 3; ++k) pose.rotation(i, k) = rot[i][k];
  }
  const auto t = r.get<std::vector<double>>("translation_cm");
  if (t.size() != 3) throw Error(Errc::parse_error, "pose.translation_cm: expected 3 values");
  pose.translation_cm = {t[0], t[1], t[2]};
  pose.px_per_cm_x = r.get<double>("px_per_cm_x");
  pose.px_per_cm_y = r.get<double>("px_per_cm_y");
  pose.reprojection_rms_px = r.get_or("reprojection_rms_px", 0.0);
  r.finish();
  return pose;
}

Eigen::Matrix3d rotation_from_euler_deg(double roll_x, double pitch_y, double yaw_z) {
  constexpr double d2r = std::numbers::pi / 180.0;
  const Eigen::AngleAxisd rx(roll_x * d2r, Eigen::Vector3d::UnitX());
  const Eigen::AngleAxisd ry(pitch_y * d2r, Eigen::Vector3d::UnitY());
  const Eigen::AngleAxisd rz(yaw_z * d2r, Eigen::Vector3d::UnitZ());
  return (rz * ry * rx).toRotationMatrix();
}

Eigen::Vector3d pixel_to_plane(const ScreenPose& pose, double x_px, double y_px, Viewport v) {
  return {x_px / pose.px_per_cm_x - screen_w_cm(pose, v) / 2, y_px / pose.px_per_cm_y - screen_h_cm(pose, v) / 2,
          0.0};
}

Eigen::Vector3d stimulus_to_3d(const ScreenPose& pose, double x_px, double y_px, Viewport v) {
  if (x_px < 0 || y_px < 0 || x_px > v.width_px || y_px > v.height_px) {
    throw Error(Errc::out_of_range, "stimulus_to_3d: pixel outside the viewport");
  }
  return pose.rotation * pixel_to_plane(pose, x_px, y_px, v) + pose.translation_cm;
}

Eigen::Vector2d camera_to_stimulus(const ScreenPose& pose, const Eigen::Vector3d& p, Viewport v) {
  const Eigen::Vector3d plane = pose.rotation.transpose() * (p - pose.translation_cm);
  return {(plane.x() + screen_w_cm(pose, v) / 2) * pose.px_per_cm_x,
          (plane.y() + screen_h_cm(pose, v) / 2) * pose.px_per_cm_y};
}

Eigen::Vector2d distort_normalized(const CameraIntrinsics& intr, const Eigen::Vector2d& xy) {
  if (intr.distortion.empty()) return xy;
  const double k1 = coeff(intr, 0), k2 = coeff(intr, 1), p1 = coeff(intr, 2), p2 = coeff(intr, 3),
               k3 = coeff(intr, 4);
  const double x = xy.x(), y = xy.y();
  const double r2 = x * x + y * y;
  const double radial = 1 + r2 * (k1 + r2 * (k2 + r2 * k3));
  return {x * radial + 2 * p1 * x * y + p2 * (r2 + 2 * x * x),
          y * radial + p1 * (r2 + 2 * y * y) + 2 * p2 * x * y};
}

Eigen::Vector2d undistort_normalized(const CameraIntrinsics& intr, const Eigen::Vector2d& xy) {
  if (intr.distortion.empty()) return xy;
  // Newton iteration on distort(p) = xy with a numeric Jacobian.
  Eigen::Vector2d p = xy;
  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::Vector2d f = distort_normalized(intr, p) - xy;
    if (f.norm() < 1e-15) break;
    constexpr double h = 1e-7;
    Eigen::Matrix2d jac;
    jac.col(0) = (distort_normalized(intr, p + Eigen::Vector2d(h, 0)) - distort_normalized(intr, p - Eigen::Vector2d(h, 0))) / (2 * h);
    jac.col(1) = (distort_normalized(intr, p + Eigen::Vector2d(0, h)) - distort_normalized(intr, p - Eigen::Vector2d(0, h))) / (2 * h);
    p -= jac.partialPivLu().solve(f);
  }
  return p;
}

Eigen::Vector2d project_to_image(const CameraIntrinsics& intr, const Eigen::Vector3d& p) {
  if (!(p.z() > 0)) throw Error(Errc::invalid_argument, "project_to_image: point is behind the camera");
  const Eigen::Vector2d d = distort_normalized(intr, {p.x() / p.z(), p.y() / p.z()});
  return {intr.fx * d.x() + intr.cx, intr.fy * d.y() + intr.cy};
}

Eigen::Vector2d image_to_normalized(const CameraIntrinsics& intr, const Eigen::Vector2d& uv) {
  return undistort_normalized(intr, {(uv.x() - intr.cx) / intr.fx, (uv.y() - intr.cy) / intr.fy});
}

Eigen::Vector2d image_to_stimulus(const ScreenPose& pose, const CameraIntrinsics& intr, const Eigen::Vector2d& uv,
                                  Viewport v) {
  const Eigen::Vector2d n = image_to_normalized(intr, uv);
  const Eigen::Vector3d ray(n.x(), n.y(), 1.0);
  const Eigen::Vector3d normal = pose.rotation.col(2);
  const double denom = normal.dot(ray);
  if (std::abs(denom) < 1e-12) throw Error(Errc::singular_configuration, "image ray parallel to the display");
  const double s = normal.dot(pose.translation_cm) / denom;
  return camera_to_stimulus(pose, s * ray, v);
}

}  // namespace stimforge::markers
